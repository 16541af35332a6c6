// Disk formats: .mnu constellation text files, JSON representative DBs,
// feature vectors and reports, CSV dumps for trajectories and curves.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "constel/bench.hpp"
#include "constel/core.hpp"
#include "constel/missing.hpp"
#include "constel/spring.hpp"
#include "constel/vicinity.hpp"

namespace constel::io {

/// Thrown on malformed input. `line` is 1-based, 0 when the error has no
/// useful position (bad header counts as line 1).
class FormatError : public std::runtime_error {
public:
    FormatError(std::string message, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// ---- .mnu constellation files ----
// Header "MNU 1", then one "x y theta" per line, theta in degrees. '#'
// starts a comment, blank lines are skipped.

Constellation parse_mnu(std::istream& in, const std::string& id);
Constellation load_mnu(const std::string& path);
std::string render_mnu(const Constellation& c);
void save_mnu(const Constellation& c, const std::string& path);

// ---- JSON: representative DBs and feature vectors ----

nlohmann::json db_to_json(const RepresentativeDB& db);
RepresentativeDB db_from_json(const nlohmann::json& j);
RepresentativeDB load_db(const std::string& path);
void save_db(const RepresentativeDB& db, const std::string& path);

nlohmann::json feature_vector_to_json(const FeatureVector& fv);
FeatureVector feature_vector_from_json(const nlohmann::json& j);
FeatureVector load_feature_vector(const std::string& path);
void save_feature_vector(const FeatureVector& fv, const std::string& path);

// ---- JSON: reports ----

nlohmann::json missing_report_to_json(const MissingReport& r);
nlohmann::json sim_result_to_json(const SimResult& r);
nlohmann::json sweep_result_to_json(const SweepResult& r);
nlohmann::json roc_report_to_json(const bench::RocReport& r);
nlohmann::json missing_gain_to_json(const bench::MissingGainReport& r);

// ---- CSV ----

void write_trajectory_csv(const std::vector<TrajectorySample>& t, std::ostream& out);
void write_sweep_csv(const SweepResult& r, std::ostream& out);
void write_pairs_csv(const std::vector<bench::PairScore>& pairs, std::ostream& out);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace constel::io
