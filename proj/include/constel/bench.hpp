// Genuine/impostor score distributions, FAR/FRR tables and the
// missing-minutia gain comparison over synthetic corpora.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "constel/core.hpp"
#include "constel/missing.hpp"
#include "constel/second_order.hpp"
#include "constel/spring.hpp"
#include "constel/synth.hpp"

namespace constel::bench {

enum class Matcher { vicinity, two_pass, spring };

std::string matcher_name(Matcher m);

struct CorpusSpec {
    std::size_t subjects = 50;
    std::size_t minutiae = 30;
    double width = 512.0, height = 512.0, min_sep = 10.0;
    synth::PerturbSpec genuine_perturb;   ///< applied to self for genuine pairs

    // Representative-DB construction (vicinity and two_pass matchers). The
    // pool comes from a separate seed stream, never from the population.
    std::size_t db_pool = 40;
    std::size_t db_size = 128;
    double rho = 75.0;
    std::size_t rep_l_min = 3, rep_l_max = 8;
    double d_min = 1.5 * 75.0 * 75.0 / 4.0;
    double t_score = 0.5 * 75.0 * 75.0 / 4.0;  ///< binarization threshold

    ScoreParams params;               ///< keep consistent with rho
    SecondOrderParams second;         ///< two_pass matcher
    PhysicsParams physics;            ///< spring matcher
    bool parallel = true;             ///< pair scoring is embarrassingly parallel
};

struct ScoreStats {
    std::size_t count = 0;
    double mean = 0.0, stdev = 0.0, min = 0.0, max = 0.0;
};

struct PairScore {
    std::string pair_id;
    bool genuine = false;
    double score = 0.0;
};

struct RocReport {
    std::vector<double> thresholds;
    std::vector<double> far;   ///< empty when there are no impostor pairs
    std::vector<double> frr;
    ScoreStats genuine_scores, impostor_scores;
    std::optional<double> auc;
    std::vector<PairScore> pairs;  ///< per-pair dump backing every rate
    nlohmann::json config;         ///< full parameter echo
};

/// Generates the population, scores every genuine (subject vs perturbed self)
/// and impostor (distinct subjects) pair with the chosen matcher and computes
/// FAR/FRR per threshold. Acceptance rule: score <= threshold. Deterministic
/// per seed. Throws on an empty population.
RocReport run_bench(Matcher m, const CorpusSpec& spec, std::vector<double> thresholds,
                    std::uint64_t seed);

struct MissingGainReport {
    std::vector<double> thresholds;
    std::vector<double> frr_plain;
    std::vector<double> frr_with_missing;
    double forgiven_total = 0.0;
    std::size_t hypotheses_total = 0;
    std::vector<PairScore> pairs;  ///< two rows per genuine pair: plain / adjusted
    nlohmann::json config;
};

/// FRR of the direct vicinity matcher with and without missing-minutia
/// forgiveness, over genuine pairs only.
MissingGainReport compare_missing_gain(const CorpusSpec& spec, std::vector<double> thresholds,
                                       std::uint64_t seed, const MissingParams& mp);

}  // namespace constel::bench
