#include "constel/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace constel::io {

namespace {

constexpr double kRadPerDeg = std::numbers::pi / 180.0;

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    return s.substr(begin, s.find_last_not_of(" \t\r") - begin + 1);
}

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(const std::string& s) {
    if (s.size() != 16) throw FormatError("db_id must be 16 hex digits");
    std::uint64_t v = 0;
    for (char ch : s) {
        int nib;
        if (ch >= '0' && ch <= '9') nib = ch - '0';
        else if (ch >= 'a' && ch <= 'f') nib = ch - 'a' + 10;
        else throw FormatError("invalid db_id digit");
        v = (v << 4) | static_cast<std::uint64_t>(nib);
    }
    return v;
}

nlohmann::json pose_json(const RigidTransform& t) {
    return {{"dx", t.dx}, {"dy", t.dy}, {"theta", t.theta}};
}

}  // namespace

FormatError::FormatError(std::string message, std::size_t line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message
                                  : std::move(message)),
      line_(line) {}

Constellation parse_mnu(std::istream& in, const std::string& id) {
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    std::vector<Minutia> ms;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (!header_seen) {
            std::istringstream hs(line);
            std::string magic;
            int version = 0;
            if (!(hs >> magic >> version) || magic != "MNU" || version != 1)
                throw FormatError("expected header 'MNU 1', got '" + line + "'", lineno);
            std::string extra;
            if (hs >> extra) throw FormatError("trailing tokens after header", lineno);
            header_seen = true;
            continue;
        }
        std::istringstream ss(line);
        double x = 0.0, y = 0.0, deg = 0.0;
        if (!(ss >> x >> y >> deg))
            throw FormatError("expected 'x y theta_degrees', got '" + line + "'", lineno);
        std::string extra;
        if (ss >> extra) throw FormatError("trailing tokens after minutia record", lineno);
        if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(deg))
            throw FormatError("non-finite value", lineno);
        ms.emplace_back(x, y, deg * kRadPerDeg);
    }
    if (!header_seen) throw FormatError("missing 'MNU 1' header", 1);
    try {
        return make_constellation(id, std::move(ms));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

Constellation load_mnu(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("cannot open '" + path + "'");
    try {
        return parse_mnu(f, std::filesystem::path(path).stem().string());
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what(), e.line());
    }
}

std::string render_mnu(const Constellation& c) {
    std::string out = "MNU 1\n";
    char buf[128];
    for (const Minutia& m : c.minutiae) {
        std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f\n", m.x, m.y, m.theta / kRadPerDeg);
        out += buf;
    }
    return out;
}

void save_mnu(const Constellation& c, const std::string& path) {
    write_file(path, render_mnu(c));
}

nlohmann::json db_to_json(const RepresentativeDB& db) {
    nlohmann::json reps = nlohmann::json::array();
    for (const Vicinity& r : db.reps) {
        nlohmann::json members = nlohmann::json::array();
        for (const Minutia& m : r.members)
            members.push_back({{"x", m.x}, {"y", m.y}, {"theta", m.theta}});
        reps.push_back({{"center", {{"x", r.center.x}, {"y", r.center.y}, {"theta", r.center.theta}}},
                        {"members", std::move(members)}});
    }
    nlohmann::json s_max;
    if (std::isfinite(db.params.s_max)) s_max = db.params.s_max;  // null encodes "gating off"
    return {{"format", "constel-db"},
            {"version", 1},
            {"order", db.order},
            {"rho", db.rho},
            {"l_min", db.l_min},
            {"l_max", db.l_max},
            {"d_min", db.d_min},
            {"params",
             {{"sigma_x", db.params.sigma_x},
              {"sigma_theta", db.params.sigma_theta},
              {"k_na", db.params.k_na},
              {"s_max", s_max}}},
            {"reps", std::move(reps)}};
}

RepresentativeDB db_from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", "") != "constel-db") throw FormatError("not a constel-db document");
        if (j.at("version").get<int>() != 1) throw FormatError("unsupported constel-db version");
        RepresentativeDB db;
        db.order = j.at("order").get<int>();
        db.rho = j.at("rho").get<double>();
        db.l_min = j.at("l_min").get<std::size_t>();
        db.l_max = j.at("l_max").get<std::size_t>();
        db.d_min = j.at("d_min").get<double>();
        const nlohmann::json& p = j.at("params");
        db.params.sigma_x = p.at("sigma_x").get<double>();
        db.params.sigma_theta = p.at("sigma_theta").get<double>();
        db.params.k_na = p.at("k_na").get<double>();
        db.params.s_max = p.at("s_max").is_null() ? std::numeric_limits<double>::infinity()
                                                  : p.at("s_max").get<double>();
        std::size_t idx = 0;
        for (const nlohmann::json& rj : j.at("reps")) {
            Vicinity v;
            const nlohmann::json& cj = rj.at("center");
            v.center = {cj.at("x").get<double>(), cj.at("y").get<double>(),
                        cj.at("theta").get<double>()};
            for (const nlohmann::json& mj : rj.at("members"))
                v.members.emplace_back(mj.at("x").get<double>(), mj.at("y").get<double>(),
                                       mj.at("theta").get<double>());
            v.order = db.order;
            v.rho = db.rho;
            v.source_index = idx++;
            db.reps.push_back(std::move(v));
        }
        refresh_id(db);
        return db;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed constel-db document: ") + e.what());
    }
}

RepresentativeDB load_db(const std::string& path) {
    try {
        return db_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void save_db(const RepresentativeDB& db, const std::string& path) {
    write_file(path, db_to_json(db).dump(2) + "\n");
}

nlohmann::json feature_vector_to_json(const FeatureVector& fv) {
    return {{"format", "constel-fv"},
            {"version", 1},
            {"db_id", hex64(fv.db_id)},
            {"threshold", fv.threshold},
            {"n", fv.size()},
            {"bits", feature_vector_hex(fv)}};
}

FeatureVector feature_vector_from_json(const nlohmann::json& j) {
    try {
        if (j.value("format", "") != "constel-fv") throw FormatError("not a constel-fv document");
        if (j.at("version").get<int>() != 1) throw FormatError("unsupported constel-fv version");
        FeatureVector fv;
        fv.db_id = parse_hex64(j.at("db_id").get<std::string>());
        fv.threshold = j.at("threshold").get<double>();
        const auto n = j.at("n").get<std::size_t>();
        fv.bits = bits_from_hex(j.at("bits").get<std::string>(), n);
        return fv;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed constel-fv document: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("malformed constel-fv document: ") + e.what());
    }
}

FeatureVector load_feature_vector(const std::string& path) {
    try {
        return feature_vector_from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": " + e.what());
    } catch (const FormatError& e) {
        throw FormatError(path + ": " + e.what());
    }
}

void save_feature_vector(const FeatureVector& fv, const std::string& path) {
    write_file(path, feature_vector_to_json(fv).dump(2) + "\n");
}

nlohmann::json missing_report_to_json(const MissingReport& r) {
    nlohmann::json hyps = nlohmann::json::array();
    for (const MissingHypothesis& h : r.hypotheses) {
        nlohmann::json supporters = nlohmann::json::array();
        for (const auto& [tvi, cvi] : h.supporters)
            supporters.push_back(nlohmann::json::array({tvi, cvi}));
        hyps.push_back({{"x", h.x},
                        {"y", h.y},
                        {"theta", h.theta},
                        {"supporters", std::move(supporters)},
                        {"forgiven", h.forgiven_penalty},
                        {"spurious", h.spurious}});
    }
    return {{"hypotheses", std::move(hyps)},
            {"k_na", r.k_na},
            {"params",
             {{"eps_miss", r.params.eps_miss},
              {"k_max", r.params.k_max},
              {"penalty_dominance_ratio", r.params.penalty_dominance_ratio},
              {"spurious_direction", r.params.spurious_direction}}}};
}

nlohmann::json sim_result_to_json(const SimResult& r) {
    return {{"e_min", r.e_min},
            {"sim_phi", r.sim_phi},
            {"steps", r.steps},
            {"converged", r.converged},
            {"energy_suspicious", r.energy_suspicious},
            {"final_pose", pose_json(r.final_pose)}};
}

nlohmann::json sweep_result_to_json(const SweepResult& r) {
    nlohmann::json curve = nlohmann::json::array();
    for (const SweepSample& s : r.curve)
        curve.push_back({{"theta", s.theta}, {"e_settled", s.e_settled}});
    return {{"refined_theta", r.refined_theta},
            {"refined_energy", r.refined_energy},
            {"curve", std::move(curve)}};
}

namespace {

nlohmann::json stats_json(const bench::ScoreStats& s) {
    return {{"count", s.count}, {"mean", s.mean}, {"stdev", s.stdev}, {"min", s.min}, {"max", s.max}};
}

}  // namespace

nlohmann::json roc_report_to_json(const bench::RocReport& r) {
    nlohmann::json j{{"thresholds", r.thresholds},
                     {"frr", r.frr},
                     {"genuine", stats_json(r.genuine_scores)},
                     {"impostor", stats_json(r.impostor_scores)},
                     {"config", r.config}};
    j["far"] = r.far.empty() ? nlohmann::json() : nlohmann::json(r.far);
    j["auc"] = r.auc ? nlohmann::json(*r.auc) : nlohmann::json();
    return j;
}

nlohmann::json missing_gain_to_json(const bench::MissingGainReport& r) {
    std::vector<double> delta;
    for (std::size_t i = 0; i < r.thresholds.size(); ++i)
        delta.push_back(r.frr_plain[i] - r.frr_with_missing[i]);
    return {{"thresholds", r.thresholds},
            {"frr_plain", r.frr_plain},
            {"frr_with_missing", r.frr_with_missing},
            {"frr_delta", delta},
            {"forgiven_total", r.forgiven_total},
            {"hypotheses_total", r.hypotheses_total},
            {"config", r.config}};
}

void write_trajectory_csv(const std::vector<TrajectorySample>& t, std::ostream& out) {
    out << "step,potential_energy,kinetic_energy,pose_x,pose_y,pose_theta\n";
    for (const TrajectorySample& s : t)
        out << s.step << ',' << fmt("%.17g", s.potential) << ',' << fmt("%.17g", s.kinetic) << ','
            << fmt("%.17g", s.pose.dx) << ',' << fmt("%.17g", s.pose.dy) << ','
            << fmt("%.17g", s.pose.theta) << '\n';
}

void write_sweep_csv(const SweepResult& r, std::ostream& out) {
    out << "theta,e_settled\n";
    for (const SweepSample& s : r.curve)
        out << fmt("%.17g", s.theta) << ',' << fmt("%.17g", s.e_settled) << '\n';
}

void write_pairs_csv(const std::vector<bench::PairScore>& pairs, std::ostream& out) {
    out << "pair_id,kind,score\n";
    for (const bench::PairScore& p : pairs)
        out << p.pair_id << ',' << (p.genuine ? "genuine" : "impostor") << ','
            << fmt("%.17g", p.score) << '\n';
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f << contents;
    if (!f) throw FormatError("short write to '" + path + "'");
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace constel::io
