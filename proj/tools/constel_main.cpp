// Command-line surface: generation, DB construction, enrollment, matching,
// physics simulation, rotation sweeps, benchmarks and alignment oracles.
// Exit codes: 0 success, 1 no-match decision, 2 usage error, 3 data error.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "constel/bench.hpp"
#include "constel/core.hpp"
#include "constel/io.hpp"
#include "constel/missing.hpp"
#include "constel/second_order.hpp"
#include "constel/spring.hpp"
#include "constel/synth.hpp"
#include "constel/vicinity.hpp"

namespace {

using namespace constel;

constexpr double kDegPerRad = 180.0 / std::numbers::pi;

int g_exit = 0;  // match sets this to 1 on a no-match decision

std::string hex64(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

void echo_config(const nlohmann::json& j) { std::cout << "config " << j.dump() << "\n"; }

std::vector<Vec2> positions(const Constellation& c) {
    std::vector<Vec2> pts;
    pts.reserve(c.size());
    for (const Minutia& m : c.minutiae) pts.push_back(m.pos());
    return pts;
}

nlohmann::json pose_json(const RigidTransform& t) {
    return {{"dx", t.dx}, {"dy", t.dy}, {"theta", t.theta}};
}

void write_csv(const std::string& path, const auto& writer) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io::FormatError("cannot open '" + path + "' for writing");
    writer(f);
    if (!f) throw io::FormatError("short write to '" + path + "'");
}

// ---- gen ----

struct GenOpts {
    std::size_t n = 30;
    double width = 512.0, height = 512.0, min_sep = 10.0;
    std::uint64_t seed = 1;
    std::string out = "gen.mnu";
    std::string perturb_out, truth_out;
    std::uint64_t perturb_seed = 0;  // 0 resolves to seed + 1
    double jitter = 0.0, jitter_theta_deg = 0.0;
    std::size_t occlusions = 0, spurious = 0;
    double distortion_amp = 0.0, distortion_scale = 0.0;
    double dx = 0.0, dy = 0.0, rot_deg = 0.0;
    bool random_transform = false;
};

void run_gen(const GenOpts& o) {
    synth::PerturbSpec ps;
    ps.seed = o.perturb_seed ? o.perturb_seed : o.seed + 1;
    ps.jitter_sigma = o.jitter;
    ps.theta_jitter_sigma = o.jitter_theta_deg / kDegPerRad;
    ps.occlusions = o.occlusions;
    ps.spurious = o.spurious;
    ps.distortion_amp = o.distortion_amp;
    ps.distortion_scale = o.distortion_scale;
    if (o.random_transform)
        ps.transform = std::nullopt;
    else
        ps.transform = RigidTransform{o.dx, o.dy, o.rot_deg / kDegPerRad};

    nlohmann::json cfg{{"cmd", "gen"},       {"n", o.n},
                       {"width", o.width},   {"height", o.height},
                       {"min_sep", o.min_sep}, {"seed", o.seed},
                       {"out", o.out}};
    if (!o.perturb_out.empty()) {
        cfg["perturb"] = {{"out", o.perturb_out},
                          {"seed", ps.seed},
                          {"jitter", ps.jitter_sigma},
                          {"jitter_theta_deg", o.jitter_theta_deg},
                          {"occlusions", ps.occlusions},
                          {"spurious", ps.spurious},
                          {"distortion_amp", ps.distortion_amp},
                          {"distortion_scale", ps.distortion_scale},
                          {"transform", ps.transform ? pose_json(*ps.transform)
                                                     : nlohmann::json("random")}};
    }
    echo_config(cfg);

    const Constellation c = synth::generate(o.n, o.width, o.height, o.min_sep, o.seed);
    io::save_mnu(c, o.out);
    std::cout << "wrote " << o.out << " (" << c.size() << " minutiae)\n";

    if (o.perturb_out.empty()) return;
    auto [pc, gt] = synth::perturb(c, ps);
    io::save_mnu(pc, o.perturb_out);
    std::cout << "wrote " << o.perturb_out << " (" << pc.size() << " minutiae)\n";
    if (!o.truth_out.empty()) {
        nlohmann::json tj{{"transform", pose_json(gt.transform)},
                          {"removed_indices", gt.removed_indices},
                          {"added_indices", gt.added_indices}};
        io::write_file(o.truth_out, tj.dump(2) + "\n");
        std::cout << "wrote " << o.truth_out << "\n";
    }
}

// ---- builddb ----

struct BuildDbOpts {
    std::vector<std::string> files;
    std::size_t synth_pool = 0;
    std::size_t n = 30;
    double width = 512.0, height = 512.0, min_sep = 10.0;
    std::uint64_t seed = 1;
    std::size_t size = 128;
    int order = 1;
    double rho = -1.0;   // <0 resolves to 75 (order 1) or 150 (order 2)
    double rho1 = 75.0;  // first-pass radius for order-2 pools
    std::size_t sig_min = 2, sig_max = 8;
    std::size_t l_min = 0, l_max = 8;  // l_min 0 resolves per order
    double d_min = -1.0;               // <0 resolves to 1.5 * k_na
    double sigma_x = 5.0, sigma_theta = 0.3;
    double k_na = -1.0, s_max = -1.0;  // <0 resolve from rho
    std::string out = "db.json";
};

void run_builddb(const BuildDbOpts& o) {
    if (o.files.empty() && o.synth_pool == 0)
        throw CLI::ValidationError("builddb", "give pool .mnu files or --synth N");
    if (o.order != 1 && o.order != 2)
        throw CLI::ValidationError("builddb", "--order must be 1 or 2");

    const double rho = o.rho > 0 ? o.rho : (o.order == 2 ? 150.0 : 75.0);
    ScoreParams p = default_score_params(rho);
    p.sigma_x = o.sigma_x;
    p.sigma_theta = o.sigma_theta;
    if (o.k_na > 0) p.k_na = o.k_na;
    if (o.s_max > 0) p.s_max = o.s_max;
    const double d_min = o.d_min >= 0 ? o.d_min : 1.5 * p.k_na;
    const std::size_t l_min = o.l_min > 0 ? o.l_min : (o.order == 2 ? 1 : 3);

    nlohmann::json cfg{{"cmd", "builddb"}, {"files", o.files},   {"synth", o.synth_pool},
                       {"n", o.n},         {"width", o.width},   {"height", o.height},
                       {"min_sep", o.min_sep}, {"seed", o.seed}, {"size", o.size},
                       {"order", o.order}, {"rho", rho},         {"rho1", o.rho1},
                       {"sig_min", o.sig_min}, {"sig_max", o.sig_max},
                       {"l_min", l_min},   {"l_max", o.l_max},   {"d_min", d_min},
                       {"sigma_x", p.sigma_x}, {"sigma_theta", p.sigma_theta},
                       {"k_na", p.k_na},   {"s_max", p.s_max},   {"out", o.out}};
    echo_config(cfg);

    std::vector<Constellation> pool;
    for (const std::string& f : o.files) pool.push_back(io::load_mnu(f));
    synth::Rng rng(o.seed);
    for (std::size_t i = 0; i < o.synth_pool; ++i)
        pool.push_back(synth::generate(o.n, o.width, o.height, o.min_sep, rng.next()));

    RepresentativeDB db;
    if (o.order == 1) {
        db = build_representative_db(pool, rho, l_min, o.l_max, d_min, o.size, p, rng.next());
    } else {
        SecondOrderParams so;
        so.rho1 = o.rho1;
        so.rho2 = rho;
        so.l_min = o.sig_min;
        so.l_max = o.sig_max;
        std::vector<Vicinity> candidates;
        for (const Constellation& c : pool)
            for (Vicinity& v : extract_second_order(c, so)) candidates.push_back(std::move(v));
        db = build_representative_db(std::move(candidates), 2, rho, l_min, o.l_max, d_min,
                                     o.size, p, rng.next());
    }
    io::save_db(db, o.out);
    std::cout << "db " << hex64(db.id) << " reps " << db.size() << " saved " << o.out << "\n";
}

// ---- enroll ----

struct EnrollOpts {
    std::string file, db = "db.json", out = "fv.json";
    double t_score = -1.0;  // <0 resolves to 0.5 * k_na
    bool serial = false;
};

void run_enroll(const EnrollOpts& o) {
    const RepresentativeDB db = io::load_db(o.db);
    if (db.order != 1)
        throw io::FormatError("enroll needs an order-1 DB; second-order matching goes "
                              "through 'match --second-order'");
    const double t = o.t_score > 0 ? o.t_score : 0.5 * db.params.k_na;
    echo_config({{"cmd", "enroll"}, {"file", o.file}, {"db", o.db}, {"db_id", hex64(db.id)},
                 {"t_score", t}, {"serial", o.serial}, {"out", o.out}});

    const Constellation c = io::load_mnu(o.file);
    const FeatureVector fv = o.serial ? compute_feature_vector_serial(c, db, t)
                                      : compute_feature_vector(c, db, t);
    io::save_feature_vector(fv, o.out);
    std::size_t ones = 0;
    for (auto b : fv.bits) ones += b;
    std::cout << "fv " << feature_vector_hex(fv) << "\n";
    std::cout << "ones " << ones << " of " << fv.size() << " saved " << o.out << "\n";
}

// ---- match ----

struct MatchOpts {
    std::string candidate, templ;
    std::string db, db2;
    std::size_t t = 16;
    double t_score = -1.0, t_score2 = -1.0;
    bool second_order = false;
    long long t2 = -1;  // <0 resolves to t
    std::size_t sig_min = 2, sig_max = 8;
    bool missing = false;
    double rho = 75.0;
    double eps_miss = 10.0;
    std::size_t k_max = 2;
    double dominance = 0.25;
    bool spurious_direction = false;
    std::string report_out;
};

void run_match(const MatchOpts& o) {
    const Constellation ca = io::load_mnu(o.candidate);
    const Constellation cb = io::load_mnu(o.templ);

    if (o.missing) {
        const ScoreParams sp = default_score_params(o.rho);
        const double ts = o.t_score > 0 ? o.t_score : 0.5 * sp.k_na;
        MissingParams mp;
        mp.eps_miss = o.eps_miss;
        mp.k_max = o.k_max;
        mp.penalty_dominance_ratio = o.dominance;
        mp.spurious_direction = o.spurious_direction;
        echo_config({{"cmd", "match"}, {"mode", "missing"}, {"candidate", o.candidate},
                     {"template", o.templ}, {"t", o.t}, {"rho", o.rho}, {"t_score", ts},
                     {"eps_miss", mp.eps_miss}, {"k_max", mp.k_max},
                     {"dominance", mp.penalty_dominance_ratio},
                     {"spurious_direction", mp.spurious_direction}});
        const DirectMatchResult r = direct_vicinity_match(ca, cb, o.rho, ts, sp, mp);
        double forgiven = 0.0;
        for (const MissingHypothesis& h : r.report.hypotheses) forgiven += h.forgiven_penalty;
        if (!o.report_out.empty())
            io::write_file(o.report_out,
                           io::missing_report_to_json(r.report).dump(2) + "\n");
        std::cout << "unmatched_plain " << r.unmatched_plain << "\n";
        std::cout << "hypotheses " << r.report.hypotheses.size() << " forgiven " << forgiven
                  << "\n";
        std::cout << "score " << r.unmatched_adjusted << "\n";
        const bool ok = r.unmatched_adjusted <= o.t;
        std::cout << "decision " << (ok ? "match" : "no-match") << "\n";
        g_exit = ok ? 0 : 1;
        return;
    }

    const RepresentativeDB db1 = io::load_db(o.db);
    const double ts1 = o.t_score > 0 ? o.t_score : 0.5 * db1.params.k_na;

    if (o.second_order) {
        if (o.db2.empty()) throw CLI::ValidationError("match", "--second-order needs --db2");
        const RepresentativeDB db2 = io::load_db(o.db2);
        const double ts2 = o.t_score2 > 0 ? o.t_score2 : 0.5 * db2.params.k_na;
        SecondOrderParams p;
        p.rho1 = db1.rho;
        p.rho2 = db2.rho;
        p.l_min = o.sig_min;
        p.l_max = o.sig_max;
        p.t1 = o.t;
        p.t2 = o.t2 >= 0 ? static_cast<std::size_t>(o.t2) : o.t;
        echo_config({{"cmd", "match"}, {"mode", "two_pass"}, {"candidate", o.candidate},
                     {"template", o.templ}, {"db", o.db}, {"db_id", hex64(db1.id)},
                     {"db2", o.db2}, {"db2_id", hex64(db2.id)}, {"t1", p.t1}, {"t2", p.t2},
                     {"t_score1", ts1}, {"t_score2", ts2}, {"rho1", p.rho1}, {"rho2", p.rho2},
                     {"sig_min", p.l_min}, {"sig_max", p.l_max}});
        const TwoPassResult r = match_two_pass(ca, cb, db1, db2, p, ts1, ts2);
        std::cout << "hamming1 " << r.hamming1 << "\n";
        std::cout << "hamming2 " << r.hamming2 << "\n";
        std::cout << "score " << std::max(r.hamming1, r.hamming2) << "\n";
        std::cout << "decision " << (r.match ? "match" : "no-match") << "\n";
        g_exit = r.match ? 0 : 1;
        return;
    }

    echo_config({{"cmd", "match"}, {"mode", "hamming"}, {"candidate", o.candidate},
                 {"template", o.templ}, {"db", o.db}, {"db_id", hex64(db1.id)}, {"t", o.t},
                 {"t_score", ts1}});
    const FeatureVector fa = compute_feature_vector(ca, db1, ts1);
    const FeatureVector fb = compute_feature_vector(cb, db1, ts1);
    const std::size_t h = hamming(fa, fb);
    std::cout << "score " << h << "\n";
    const bool ok = h <= o.t;
    std::cout << "decision " << (ok ? "match" : "no-match") << "\n";
    g_exit = ok ? 0 : 1;
}

// ---- shared physics options ----

struct PhysOpts {
    double k = 1.0, kv = 0.0, dt = 0.01, eps_kinetic = 0.0;
    std::size_t max_steps = 200000, settle_window = 50;
};

void add_phys_opts(CLI::App* cmd, PhysOpts& p) {
    cmd->add_option("--k", p.k, "spring stiffness")->capture_default_str();
    cmd->add_option("--kv", p.kv, "drag coefficient (0 = critical-plus auto)")
        ->capture_default_str();
    cmd->add_option("--dt", p.dt, "timestep")->capture_default_str();
    cmd->add_option("--eps-kinetic", p.eps_kinetic, "settle threshold (0 = auto)")
        ->capture_default_str();
    cmd->add_option("--max-steps", p.max_steps, "step budget")->capture_default_str();
    cmd->add_option("--settle-window", p.settle_window, "consecutive quiet steps")
        ->capture_default_str();
}

PhysicsParams to_params(const PhysOpts& o) {
    PhysicsParams p;
    p.k = o.k;
    p.k_v = o.kv;
    p.dt = o.dt;
    p.eps_kinetic = o.eps_kinetic;
    p.max_steps = o.max_steps;
    p.settle_window = o.settle_window;
    return p;
}

// ---- simulate ----

struct SimulateOpts {
    std::string a, b;
    PhysOpts phys;
    bool lock_rotation = false;
    double base = std::numbers::e;
    std::string trajectory_out, json_out;
    std::size_t stride = 10;
};

void run_simulate(const SimulateOpts& o) {
    const Constellation ca = io::load_mnu(o.a);
    const Constellation cb = io::load_mnu(o.b);
    SpringSystem sys = assemble(positions(ca), positions(cb), to_params(o.phys));
    sys.lock_rotation = o.lock_rotation;
    echo_config({{"cmd", "simulate"}, {"a", o.a}, {"b", o.b}, {"k", sys.params.k},
                 {"kv", sys.params.k_v}, {"dt", sys.params.dt},
                 {"eps_kinetic", sys.params.eps_kinetic}, {"max_steps", sys.params.max_steps},
                 {"settle_window", sys.params.settle_window},
                 {"lock_rotation", sys.lock_rotation}, {"base", o.base},
                 {"stride", o.stride}, {"trajectory", o.trajectory_out}});

    const SimResult r = simulate(std::move(sys), o.trajectory_out.empty() ? 0 : o.stride);
    std::cout << "e_min " << r.e_min << "\n";
    std::cout << "sim_phi " << r.sim_phi << "\n";
    std::cout << "similarity " << similarity_score(r.e_min, o.base) << "\n";
    std::cout << "steps " << r.steps << " converged " << (r.converged ? "yes" : "no") << "\n";
    std::cout << "final_pose " << r.final_pose.dx << " " << r.final_pose.dy << " "
              << r.final_pose.theta * kDegPerRad << "\n";
    if (r.energy_suspicious)
        std::cerr << "warning: settled energy above the analytic optimum; possible "
                     "meta-stable state\n";
    if (!o.trajectory_out.empty()) {
        write_csv(o.trajectory_out,
                  [&](std::ostream& f) { io::write_trajectory_csv(r.trajectory, f); });
        std::cout << "saved " << o.trajectory_out << "\n";
    }
    if (!o.json_out.empty())
        io::write_file(o.json_out, io::sim_result_to_json(r).dump(2) + "\n");
}

// ---- sweep ----

struct SweepOpts {
    std::string a, b;
    PhysOpts phys;
    double increment_deg = 10.0, refine_stop_deg = 0.5;
    double cx = 0.0, cy = 0.0;
    bool center_given = false;
    bool serial = false;
    std::string out = "sweep.csv", json_out;
};

void run_sweep(const SweepOpts& o, bool cx_set, bool cy_set) {
    const Constellation ca = io::load_mnu(o.a);
    const Constellation cb = io::load_mnu(o.b);
    const std::vector<Vec2> pa = positions(ca), pb = positions(cb);
    Vec2 center{};
    if (cx_set || cy_set) {
        center = {o.cx, o.cy};
    } else if (!pa.empty()) {
        for (Vec2 p : pa) center += p;
        center = (1.0 / static_cast<double>(pa.size())) * center;
    }
    SweepParams sp;
    sp.increment = o.increment_deg / kDegPerRad;
    sp.refine_stop = o.refine_stop_deg / kDegPerRad;
    sp.physics = to_params(o.phys);
    sp.parallel = !o.serial;
    echo_config({{"cmd", "sweep"}, {"a", o.a}, {"b", o.b},
                 {"increment_deg", o.increment_deg}, {"refine_stop_deg", o.refine_stop_deg},
                 {"cx", center.x}, {"cy", center.y}, {"k", sp.physics.k},
                 {"kv", sp.physics.k_v}, {"dt", sp.physics.dt},
                 {"max_steps", sp.physics.max_steps}, {"serial", o.serial}, {"out", o.out}});

    const SweepResult r = rotation_sweep(pa, pb, center, sp);
    write_csv(o.out, [&](std::ostream& f) { io::write_sweep_csv(r, f); });
    std::cout << "samples " << r.curve.size() << "\n";
    std::cout << "refined_theta_deg " << r.refined_theta * kDegPerRad << "\n";
    std::cout << "refined_energy " << r.refined_energy << "\n";
    std::cout << "saved " << o.out << "\n";
    if (!o.json_out.empty())
        io::write_file(o.json_out, io::sweep_result_to_json(r).dump(2) + "\n");
}

// ---- bench ----

struct BenchOpts {
    bench::Matcher matcher = bench::Matcher::vicinity;
    bool missing_gain = false;
    std::size_t subjects = 50, minutiae = 30;
    double width = 512.0, height = 512.0, min_sep = 10.0;
    double jitter = 2.0, jitter_theta_deg = 3.0;
    std::size_t occlusions = 0, spurious = 0;
    bool random_transform = false;
    std::size_t db_pool = 40, db_size = 128;
    double rho = 75.0;
    std::size_t rep_l_min = 3, rep_l_max = 8;
    double d_min = -1.0, t_score = -1.0;
    double rho2 = 150.0;
    double eps_miss = 10.0;
    std::size_t k_max = 2;
    double dominance = 0.25;
    bool spurious_direction = false;
    std::vector<double> thresholds;
    std::uint64_t seed = 1;
    bool serial = false;
    std::string out = "bench.json", pairs_csv;
};

void run_bench_cmd(const BenchOpts& o) {
    bench::CorpusSpec spec;
    spec.subjects = o.subjects;
    spec.minutiae = o.minutiae;
    spec.width = o.width;
    spec.height = o.height;
    spec.min_sep = o.min_sep;
    spec.genuine_perturb.jitter_sigma = o.jitter;
    spec.genuine_perturb.theta_jitter_sigma = o.jitter_theta_deg / kDegPerRad;
    spec.genuine_perturb.occlusions = o.occlusions;
    spec.genuine_perturb.spurious = o.spurious;
    if (o.random_transform) spec.genuine_perturb.transform = std::nullopt;
    spec.db_pool = o.db_pool;
    spec.db_size = o.db_size;
    spec.rho = o.rho;
    spec.rep_l_min = o.rep_l_min;
    spec.rep_l_max = o.rep_l_max;
    spec.params = default_score_params(o.rho);
    spec.d_min = o.d_min >= 0 ? o.d_min : 1.5 * spec.params.k_na;
    spec.t_score = o.t_score > 0 ? o.t_score : 0.5 * spec.params.k_na;
    spec.second.rho1 = o.rho;
    spec.second.rho2 = o.rho2;
    spec.parallel = !o.serial;

    std::vector<double> thresholds = o.thresholds;
    if (thresholds.empty()) {
        if (o.missing_gain)
            thresholds = {0, 1, 2, 3, 4, 5, 6};
        else if (o.matcher == bench::Matcher::spring)
            thresholds = {1, 10, 100, 1e3, 1e4, 1e5, 1e6};
        else
            thresholds = {0, 2, 4, 8, 12, 16, 24, 32, 48, 64};
    }

    if (o.missing_gain) {
        MissingParams mp;
        mp.eps_miss = o.eps_miss;
        mp.k_max = o.k_max;
        mp.penalty_dominance_ratio = o.dominance;
        mp.spurious_direction = o.spurious_direction;
        const bench::MissingGainReport r =
            bench::compare_missing_gain(spec, thresholds, o.seed, mp);
        echo_config(r.config);
        io::write_file(o.out, io::missing_gain_to_json(r).dump(2) + "\n");
        if (!o.pairs_csv.empty())
            write_csv(o.pairs_csv, [&](std::ostream& f) { io::write_pairs_csv(r.pairs, f); });
        std::cout << "hypotheses " << r.hypotheses_total << " forgiven " << r.forgiven_total
                  << "\n";
        for (std::size_t i = 0; i < r.thresholds.size(); ++i)
            std::cout << "t " << r.thresholds[i] << " frr_plain " << r.frr_plain[i]
                      << " frr_with_missing " << r.frr_with_missing[i] << "\n";
        std::cout << "saved " << o.out << "\n";
        return;
    }

    const bench::RocReport r = bench::run_bench(o.matcher, spec, thresholds, o.seed);
    echo_config(r.config);
    io::write_file(o.out, io::roc_report_to_json(r).dump(2) + "\n");
    if (!o.pairs_csv.empty())
        write_csv(o.pairs_csv, [&](std::ostream& f) { io::write_pairs_csv(r.pairs, f); });
    std::cout << "genuine mean " << r.genuine_scores.mean << " stdev " << r.genuine_scores.stdev
              << " n " << r.genuine_scores.count << "\n";
    std::cout << "impostor mean " << r.impostor_scores.mean << " stdev "
              << r.impostor_scores.stdev << " n " << r.impostor_scores.count << "\n";
    if (r.auc) std::cout << "auc " << *r.auc << "\n";
    for (std::size_t i = 0; i < r.thresholds.size(); ++i) {
        std::cout << "t " << r.thresholds[i];
        if (!r.far.empty()) std::cout << " far " << r.far[i];
        std::cout << " frr " << r.frr[i] << "\n";
    }
    std::cout << "saved " << o.out << "\n";
}

// ---- oracle ----

struct OracleOpts {
    std::string a, b;
    double k = 1.0;
    std::size_t theta_samples = 72, trans_samples = 9, refine_from = 3;
    double trans_span = 0.0, tol = 1e-4;
};

void run_oracle(const OracleOpts& o) {
    const Constellation ca = io::load_mnu(o.a);
    const Constellation cb = io::load_mnu(o.b);
    const std::vector<Vec2> pa = positions(ca), pb = positions(cb);
    echo_config({{"cmd", "oracle"}, {"a", o.a}, {"b", o.b}, {"k", o.k},
                 {"theta_samples", o.theta_samples}, {"trans_samples", o.trans_samples},
                 {"trans_span", o.trans_span}, {"tol", o.tol},
                 {"refine_from", o.refine_from}});

    const KabschResult kb = kabsch_align(pa, pb);
    std::cout << "kabsch_transform " << kb.transform.dx << " " << kb.transform.dy << " "
              << kb.transform.theta * kDegPerRad << "\n";
    std::cout << "kabsch_residual_sq " << kb.residual_sq << "\n";
    std::cout << "kabsch_e_opt " << 0.5 * o.k * kb.residual_sq << "\n";

    GridSearchSpec grid;
    grid.theta_samples = o.theta_samples;
    grid.trans_samples = o.trans_samples;
    grid.trans_span = o.trans_span;
    grid.tol = o.tol;
    grid.refine_from = o.refine_from;
    const BruteForceResult bf = brute_force_sim(pa, pb, grid);
    std::cout << "brute_value " << bf.value << "\n";
    std::cout << "brute_argmin " << bf.argmin.dx << " " << bf.argmin.dy << " "
              << bf.argmin.theta * kDegPerRad << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constel: oriented point-constellation matching"};
    app.require_subcommand(1);

    auto gen = std::make_shared<GenOpts>();
    {
        CLI::App* c = app.add_subcommand("gen", "generate a synthetic constellation");
        c->add_option("--n", gen->n, "minutiae count")->capture_default_str();
        c->add_option("--width", gen->width)->capture_default_str();
        c->add_option("--height", gen->height)->capture_default_str();
        c->add_option("--min-sep", gen->min_sep)->capture_default_str();
        c->add_option("--seed", gen->seed)->capture_default_str();
        c->add_option("-o,--out", gen->out)->capture_default_str();
        c->add_option("--perturb-out", gen->perturb_out, "also write a perturbed copy");
        c->add_option("--truth", gen->truth_out, "write perturbation ground truth JSON");
        c->add_option("--perturb-seed", gen->perturb_seed, "0 = seed + 1")
            ->capture_default_str();
        c->add_option("--jitter", gen->jitter, "position jitter sigma (px)")
            ->capture_default_str();
        c->add_option("--jitter-theta", gen->jitter_theta_deg, "orientation jitter sigma (deg)")
            ->capture_default_str();
        c->add_option("--occlusions", gen->occlusions)->capture_default_str();
        c->add_option("--spurious", gen->spurious)->capture_default_str();
        c->add_option("--distortion-amp", gen->distortion_amp)->capture_default_str();
        c->add_option("--distortion-scale", gen->distortion_scale)->capture_default_str();
        c->add_option("--dx", gen->dx)->capture_default_str();
        c->add_option("--dy", gen->dy)->capture_default_str();
        c->add_option("--rot", gen->rot_deg, "rotation (deg)")->capture_default_str();
        c->add_flag("--random-transform", gen->random_transform, "draw a random rigid pose");
        c->callback([gen] { run_gen(*gen); });
    }

    auto bdb = std::make_shared<BuildDbOpts>();
    {
        CLI::App* c = app.add_subcommand("builddb", "build a representative DB");
        c->add_option("files", bdb->files, "pool .mnu files");
        c->add_option("--synth", bdb->synth_pool, "also generate this many pool constellations")
            ->capture_default_str();
        c->add_option("--n", bdb->n, "minutiae per synthetic pool constellation")
            ->capture_default_str();
        c->add_option("--width", bdb->width)->capture_default_str();
        c->add_option("--height", bdb->height)->capture_default_str();
        c->add_option("--min-sep", bdb->min_sep)->capture_default_str();
        c->add_option("--seed", bdb->seed)->capture_default_str();
        c->add_option("--size", bdb->size, "target rep count")->capture_default_str();
        c->add_option("--order", bdb->order, "1 or 2")->capture_default_str();
        c->add_option("--rho", bdb->rho, "extraction radius (<0 = 75 or 150 by order)")
            ->capture_default_str();
        c->add_option("--rho1", bdb->rho1, "first-pass radius for order-2 pools")
            ->capture_default_str();
        c->add_option("--sig-min", bdb->sig_min, "significance lower bound (order 2)")
            ->capture_default_str();
        c->add_option("--sig-max", bdb->sig_max, "significance upper bound (order 2)")
            ->capture_default_str();
        c->add_option("--l-min", bdb->l_min, "rep member-count lower bound (0 = per order)")
            ->capture_default_str();
        c->add_option("--l-max", bdb->l_max)->capture_default_str();
        c->add_option("--d-min", bdb->d_min, "pairwise dissimilarity floor (<0 = 1.5*k_na)")
            ->capture_default_str();
        c->add_option("--sigma-x", bdb->sigma_x)->capture_default_str();
        c->add_option("--sigma-theta", bdb->sigma_theta)->capture_default_str();
        c->add_option("--k-na", bdb->k_na, "non-association penalty (<0 = rho^2/4)")
            ->capture_default_str();
        c->add_option("--s-max", bdb->s_max, "gating cap (<0 = 3*rho^2/4)")
            ->capture_default_str();
        c->add_option("-o,--out", bdb->out)->capture_default_str();
        c->callback([bdb] { run_builddb(*bdb); });
    }

    auto enr = std::make_shared<EnrollOpts>();
    {
        CLI::App* c = app.add_subcommand("enroll", "compute and persist a feature vector");
        c->add_option("file", enr->file, "constellation .mnu")->required();
        c->add_option("--db", enr->db)->capture_default_str();
        c->add_option("--t-score", enr->t_score, "binarization threshold (<0 = 0.5*k_na)")
            ->capture_default_str();
        c->add_flag("--serial", enr->serial, "disable the parallel kernel");
        c->add_option("-o,--out", enr->out)->capture_default_str();
        c->callback([enr] { run_enroll(*enr); });
    }

    auto mat = std::make_shared<MatchOpts>();
    {
        CLI::App* c = app.add_subcommand("match", "compare two constellations");
        c->add_option("candidate", mat->candidate)->required();
        c->add_option("template", mat->templ)->required();
        c->add_option("--db", mat->db, "order-1 representative DB");
        c->add_option("--db2", mat->db2, "order-2 representative DB");
        c->add_option("-t,--threshold", mat->t, "Hamming decision threshold")
            ->capture_default_str();
        c->add_option("--t-score", mat->t_score, "binarization threshold (<0 = 0.5*k_na)")
            ->capture_default_str();
        c->add_option("--t-score2", mat->t_score2, "second-pass binarization threshold")
            ->capture_default_str();
        c->add_flag("--second-order", mat->second_order, "double-pass decision");
        c->add_option("--t2", mat->t2, "second-pass Hamming threshold (<0 = t)")
            ->capture_default_str();
        c->add_option("--sig-min", mat->sig_min)->capture_default_str();
        c->add_option("--sig-max", mat->sig_max)->capture_default_str();
        c->add_flag("--missing", mat->missing,
                    "direct vicinity match with missing-minutia forgiveness");
        c->add_option("--rho", mat->rho, "extraction radius (--missing)")->capture_default_str();
        c->add_option("--eps-miss", mat->eps_miss)->capture_default_str();
        c->add_option("--k-max", mat->k_max)->capture_default_str();
        c->add_option("--dominance", mat->dominance)->capture_default_str();
        c->add_flag("--spurious-direction", mat->spurious_direction,
                    "also hypothesize spurious candidate minutiae");
        c->add_option("--report", mat->report_out, "write the missing report JSON");
        c->callback([mat] { run_match(*mat); });
    }

    auto sim = std::make_shared<SimulateOpts>();
    {
        CLI::App* c = app.add_subcommand("simulate", "relax the spring system");
        c->add_option("a", sim->a, "mobile constellation .mnu")->required();
        c->add_option("b", sim->b, "anchor constellation .mnu")->required();
        add_phys_opts(c, sim->phys);
        c->add_flag("--lock-rotation", sim->lock_rotation);
        c->add_option("--base", sim->base, "similarity base c > 1")->capture_default_str();
        c->add_option("--trajectory", sim->trajectory_out, "write trajectory CSV");
        c->add_option("--stride", sim->stride, "trajectory sampling stride")
            ->capture_default_str();
        c->add_option("--json", sim->json_out, "write the result JSON");
        c->callback([sim] { run_simulate(*sim); });
    }

    auto swp = std::make_shared<SweepOpts>();
    CLI::Option *swp_cx = nullptr, *swp_cy = nullptr;
    {
        CLI::App* c = app.add_subcommand("sweep", "forced-rotation energy curve");
        c->add_option("a", swp->a)->required();
        c->add_option("b", swp->b)->required();
        add_phys_opts(c, swp->phys);
        c->add_option("--increment", swp->increment_deg, "sample spacing (deg)")
            ->capture_default_str();
        c->add_option("--refine-stop", swp->refine_stop_deg, "refinement floor (deg)")
            ->capture_default_str();
        swp_cx = c->add_option("--cx", swp->cx, "rotation center x (default: centroid of a)");
        swp_cy = c->add_option("--cy", swp->cy, "rotation center y");
        c->add_flag("--serial", swp->serial, "disable the parallel kernel");
        c->add_option("-o,--out", swp->out)->capture_default_str();
        c->add_option("--json", swp->json_out, "write the result JSON");
        c->callback([swp, &swp_cx, &swp_cy] {
            run_sweep(*swp, swp_cx->count() > 0, swp_cy->count() > 0);
        });
    }

    auto ben = std::make_shared<BenchOpts>();
    {
        CLI::App* c = app.add_subcommand("bench", "genuine/impostor score benchmark");
        const std::map<std::string, bench::Matcher> names{
            {"vicinity", bench::Matcher::vicinity},
            {"two_pass", bench::Matcher::two_pass},
            {"spring", bench::Matcher::spring}};
        c->add_option("--matcher", ben->matcher, "vicinity | two_pass | spring")
            ->transform(CLI::CheckedTransformer(names, CLI::ignore_case))
            ->capture_default_str();
        c->add_flag("--missing-gain", ben->missing_gain,
                    "compare FRR with and without missing-minutia forgiveness");
        c->add_option("--subjects", ben->subjects)->capture_default_str();
        c->add_option("--minutiae", ben->minutiae)->capture_default_str();
        c->add_option("--width", ben->width)->capture_default_str();
        c->add_option("--height", ben->height)->capture_default_str();
        c->add_option("--min-sep", ben->min_sep)->capture_default_str();
        c->add_option("--jitter", ben->jitter, "genuine-pair jitter sigma (px)")
            ->capture_default_str();
        c->add_option("--jitter-theta", ben->jitter_theta_deg,
                      "genuine-pair orientation jitter (deg)")
            ->capture_default_str();
        c->add_option("--occlusions", ben->occlusions)->capture_default_str();
        c->add_option("--spurious", ben->spurious)->capture_default_str();
        c->add_flag("--random-transform", ben->random_transform,
                    "random rigid pose per genuine pair");
        c->add_option("--db-pool", ben->db_pool)->capture_default_str();
        c->add_option("--db-size", ben->db_size)->capture_default_str();
        c->add_option("--rho", ben->rho)->capture_default_str();
        c->add_option("--rep-l-min", ben->rep_l_min)->capture_default_str();
        c->add_option("--rep-l-max", ben->rep_l_max)->capture_default_str();
        c->add_option("--d-min", ben->d_min, "<0 = 1.5*k_na")->capture_default_str();
        c->add_option("--t-score", ben->t_score, "<0 = 0.5*k_na")->capture_default_str();
        c->add_option("--rho2", ben->rho2, "second-order radius (two_pass)")
            ->capture_default_str();
        c->add_option("--eps-miss", ben->eps_miss)->capture_default_str();
        c->add_option("--k-max", ben->k_max)->capture_default_str();
        c->add_option("--dominance", ben->dominance)->capture_default_str();
        c->add_flag("--spurious-direction", ben->spurious_direction);
        c->add_option("--thresholds", ben->thresholds, "decision thresholds (empty = per matcher)");
        c->add_option("--seed", ben->seed)->capture_default_str();
        c->add_flag("--serial", ben->serial, "disable the parallel kernels");
        c->add_option("-o,--out", ben->out)->capture_default_str();
        c->add_option("--pairs-csv", ben->pairs_csv, "write the per-pair score dump");
        c->callback([ben] { run_bench_cmd(*ben); });
    }

    auto ora = std::make_shared<OracleOpts>();
    {
        CLI::App* c = app.add_subcommand("oracle", "closed-form and grid-search alignment");
        c->add_option("a", ora->a)->required();
        c->add_option("b", ora->b)->required();
        c->add_option("--k", ora->k, "stiffness for the e_opt report")->capture_default_str();
        c->add_option("--theta-samples", ora->theta_samples)->capture_default_str();
        c->add_option("--trans-samples", ora->trans_samples)->capture_default_str();
        c->add_option("--trans-span", ora->trans_span, "0 = auto")->capture_default_str();
        c->add_option("--tol", ora->tol)->capture_default_str();
        c->add_option("--refine-from", ora->refine_from)->capture_default_str();
        c->callback([ora] { run_oracle(*ora); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return g_exit;
}
