#include "constel/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <stdexcept>

#include "constel/vicinity.hpp"

namespace constel::bench {

std::string matcher_name(Matcher m) {
    switch (m) {
        case Matcher::vicinity: return "vicinity";
        case Matcher::two_pass: return "two_pass";
        case Matcher::spring: return "spring";
    }
    return "unknown";
}

namespace {

std::string genuine_label(std::size_t i, const char* suffix = "") {
    char buf[64];
    std::snprintf(buf, sizeof buf, "g%03zu%s", i, suffix);
    return buf;
}

std::string impostor_label(std::size_t i, std::size_t j) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "i%03zu-%03zu", i, j);
    return buf;
}

ScoreStats stats_of(const std::vector<double>& xs) {
    ScoreStats s;
    s.count = xs.size();
    if (xs.empty()) return s;
    s.min = *std::min_element(xs.begin(), xs.end());
    s.max = *std::max_element(xs.begin(), xs.end());
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    for (double x : xs) s.stdev += (x - s.mean) * (x - s.mean);
    s.stdev = std::sqrt(s.stdev / static_cast<double>(xs.size()));
    return s;
}

// Rank-sum Mann-Whitney with midranks for ties: the probability that a random
// genuine score beats (scores under) a random impostor score.
double mann_whitney_auc(const std::vector<double>& genuine, const std::vector<double>& impostor) {
    struct Tagged {
        double v;
        bool impostor;
    };
    std::vector<Tagged> all;
    all.reserve(genuine.size() + impostor.size());
    for (double v : genuine) all.push_back({v, false});
    for (double v : impostor) all.push_back({v, true});
    std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.v < b.v; });

    double rank_sum_imp = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].v == all[i].v) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based average rank
        for (std::size_t k = i; k < j; ++k)
            if (all[k].impostor) rank_sum_imp += midrank;
        i = j;
    }
    const auto ni = static_cast<double>(impostor.size());
    const auto ng = static_cast<double>(genuine.size());
    const double u_imp = rank_sum_imp - ni * (ni + 1.0) / 2.0;
    return u_imp / (ng * ni);
}

struct SeedSchedule {
    std::vector<std::uint64_t> subjects, perturbs, pool;
    std::uint64_t db1 = 0, db2 = 0;
};

SeedSchedule draw_seeds(const CorpusSpec& spec, std::uint64_t seed) {
    synth::Rng master(seed);
    SeedSchedule s;
    for (std::size_t i = 0; i < spec.subjects; ++i) s.subjects.push_back(master.next());
    for (std::size_t i = 0; i < spec.subjects; ++i) s.perturbs.push_back(master.next());
    for (std::size_t i = 0; i < spec.db_pool; ++i) s.pool.push_back(master.next());
    s.db1 = master.next();
    s.db2 = master.next();
    return s;
}

std::vector<Constellation> make_population(const CorpusSpec& spec,
                                           const std::vector<std::uint64_t>& seeds) {
    std::vector<Constellation> out;
    out.reserve(seeds.size());
    for (std::uint64_t s : seeds)
        out.push_back(synth::generate(spec.minutiae, spec.width, spec.height, spec.min_sep, s));
    return out;
}

std::vector<Constellation> make_probes(const CorpusSpec& spec,
                                       const std::vector<Constellation>& subjects,
                                       const std::vector<std::uint64_t>& seeds) {
    std::vector<Constellation> out;
    out.reserve(subjects.size());
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        synth::PerturbSpec ps = spec.genuine_perturb;
        ps.seed = seeds[i];
        out.push_back(synth::perturb(subjects[i], ps).first);
    }
    return out;
}

std::vector<Vec2> positions(const Constellation& c, std::size_t limit) {
    std::vector<Vec2> out;
    out.reserve(limit);
    for (std::size_t i = 0; i < limit; ++i) out.push_back(c.minutiae[i].pos());
    return out;
}

double spring_score(const Constellation& a, const Constellation& b, const PhysicsParams& p) {
    const std::size_t l = std::min(a.size(), b.size());
    if (l == 0) throw std::invalid_argument("spring matcher needs non-empty constellations");
    return simulate(assemble(positions(a, l), positions(b, l), p)).e_min;
}

nlohmann::json config_echo(const CorpusSpec& spec, std::uint64_t seed,
                           const std::vector<double>& thresholds) {
    const synth::PerturbSpec& g = spec.genuine_perturb;
    nlohmann::json tf;
    if (g.transform)
        tf = {{"dx", g.transform->dx}, {"dy", g.transform->dy}, {"theta", g.transform->theta}};
    else
        tf = "random";
    return {
        {"seed", seed},
        {"thresholds", thresholds},
        {"subjects", spec.subjects},
        {"minutiae", spec.minutiae},
        {"width", spec.width},
        {"height", spec.height},
        {"min_sep", spec.min_sep},
        {"genuine_perturb",
         {{"transform", tf},
          {"jitter_sigma", g.jitter_sigma},
          {"theta_jitter_sigma", g.theta_jitter_sigma},
          {"occlusions", g.occlusions},
          {"spurious", g.spurious},
          {"distortion_amp", g.distortion_amp},
          {"distortion_scale", g.distortion_scale}}},
        {"db_pool", spec.db_pool},
        {"db_size", spec.db_size},
        {"rho", spec.rho},
        {"rep_l_min", spec.rep_l_min},
        {"rep_l_max", spec.rep_l_max},
        {"d_min", spec.d_min},
        {"t_score", spec.t_score},
        {"params",
         {{"sigma_x", spec.params.sigma_x},
          {"sigma_theta", spec.params.sigma_theta},
          {"k_na", spec.params.k_na},
          {"s_max", spec.params.s_max}}},
        {"second",
         {{"rho1", spec.second.rho1},
          {"rho2", spec.second.rho2},
          {"l_min", spec.second.l_min},
          {"l_max", spec.second.l_max},
          {"t1", spec.second.t1},
          {"t2", spec.second.t2}}},
        {"physics",
         {{"k", spec.physics.k},
          {"k_v", spec.physics.k_v},
          {"dt", spec.physics.dt},
          {"max_steps", spec.physics.max_steps},
          {"eps_kinetic", spec.physics.eps_kinetic},
          {"settle_window", spec.physics.settle_window}}},
        {"parallel", spec.parallel},
    };
}

}  // namespace

RocReport run_bench(Matcher m, const CorpusSpec& spec, std::vector<double> thresholds,
                    std::uint64_t seed) {
    if (spec.subjects == 0) throw std::invalid_argument("empty population");
    const SeedSchedule seeds = draw_seeds(spec, seed);
    const std::vector<Constellation> subjects = make_population(spec, seeds.subjects);
    const std::vector<Constellation> probes = make_probes(spec, subjects, seeds.perturbs);

    struct PairSpec {
        std::string id;
        bool genuine;
        std::size_t i, j;
    };
    std::vector<PairSpec> plan;
    for (std::size_t i = 0; i < spec.subjects; ++i)
        plan.push_back({genuine_label(i), true, i, i});
    for (std::size_t i = 0; i < spec.subjects; ++i)
        for (std::size_t j = i + 1; j < spec.subjects; ++j)
            plan.push_back({impostor_label(i, j), false, i, j});

    std::vector<double> scores(plan.size(), 0.0);
    if (m == Matcher::spring) {
        // pair scoring kernel: every simulation is independent
        std::exception_ptr err;
        const auto n = static_cast<std::ptrdiff_t>(plan.size());
        if (spec.parallel) {
#pragma omp parallel for schedule(dynamic)
            for (std::ptrdiff_t p = 0; p < n; ++p) {
                try {
                    const PairSpec& ps = plan[p];
                    const Constellation& rhs = ps.genuine ? probes[ps.j] : subjects[ps.j];
                    scores[p] = spring_score(subjects[ps.i], rhs, spec.physics);
                } catch (...) {
#pragma omp critical
                    if (!err) err = std::current_exception();
                }
            }
        } else {
            for (std::ptrdiff_t p = 0; p < n; ++p) {
                const PairSpec& ps = plan[p];
                const Constellation& rhs = ps.genuine ? probes[ps.j] : subjects[ps.j];
                scores[p] = spring_score(subjects[ps.i], rhs, spec.physics);
            }
        }
        if (err) std::rethrow_exception(err);
    } else {
        const std::vector<Constellation> pool = make_population(spec, seeds.pool);
        const RepresentativeDB db1 =
            build_representative_db(pool, spec.rho, spec.rep_l_min, spec.rep_l_max, spec.d_min,
                                    spec.db_size, spec.params, seeds.db1);
        std::vector<FeatureVector> fv_s(spec.subjects), fv_p(spec.subjects);
        for (std::size_t i = 0; i < spec.subjects; ++i) {
            fv_s[i] = compute_feature_vector(extract_vicinities(subjects[i], spec.rho), db1,
                                             spec.t_score, spec.parallel);
            fv_p[i] = compute_feature_vector(extract_vicinities(probes[i], spec.rho), db1,
                                             spec.t_score, spec.parallel);
        }
        std::vector<FeatureVector> fv2_s, fv2_p;
        RepresentativeDB db2;
        if (m == Matcher::two_pass) {
            std::vector<Vicinity> cands;
            for (const Constellation& c : pool) {
                std::vector<Vicinity> vs = extract_second_order(c, spec.second);
                cands.insert(cands.end(), std::make_move_iterator(vs.begin()),
                             std::make_move_iterator(vs.end()));
            }
            db2 = build_representative_db(std::move(cands), 2, spec.second.rho2, 1,
                                          spec.rep_l_max, spec.d_min, spec.db_size, spec.params,
                                          seeds.db2);
            fv2_s.resize(spec.subjects);
            fv2_p.resize(spec.subjects);
            for (std::size_t i = 0; i < spec.subjects; ++i) {
                fv2_s[i] = compute_feature_vector(extract_second_order(subjects[i], spec.second),
                                                  db2, spec.t_score, spec.parallel);
                fv2_p[i] = compute_feature_vector(extract_second_order(probes[i], spec.second),
                                                  db2, spec.t_score, spec.parallel);
            }
        }
        for (std::size_t p = 0; p < plan.size(); ++p) {
            const PairSpec& ps = plan[p];
            const FeatureVector& lhs = fv_s[ps.i];
            const FeatureVector& rhs = ps.genuine ? fv_p[ps.j] : fv_s[ps.j];
            double score = static_cast<double>(hamming(lhs, rhs));
            if (m == Matcher::two_pass) {
                const FeatureVector& lhs2 = fv2_s[ps.i];
                const FeatureVector& rhs2 = ps.genuine ? fv2_p[ps.j] : fv2_s[ps.j];
                score = std::max(score, static_cast<double>(hamming(lhs2, rhs2)));
            }
            scores[p] = score;
        }
    }

    RocReport r;
    std::vector<double> genuine, impostor;
    for (std::size_t p = 0; p < plan.size(); ++p) {
        (plan[p].genuine ? genuine : impostor).push_back(scores[p]);
        r.pairs.push_back({plan[p].id, plan[p].genuine, scores[p]});
    }
    std::sort(thresholds.begin(), thresholds.end());
    r.thresholds = thresholds;
    for (double tau : thresholds) {
        std::size_t fr = 0;
        for (double g : genuine) fr += g > tau;
        r.frr.push_back(static_cast<double>(fr) / static_cast<double>(genuine.size()));
        if (!impostor.empty()) {
            std::size_t fa = 0;
            for (double s : impostor) fa += s <= tau;
            r.far.push_back(static_cast<double>(fa) / static_cast<double>(impostor.size()));
        }
    }
    r.genuine_scores = stats_of(genuine);
    r.impostor_scores = stats_of(impostor);
    if (!genuine.empty() && !impostor.empty()) r.auc = mann_whitney_auc(genuine, impostor);
    r.config = config_echo(spec, seed, thresholds);
    r.config["matcher"] = matcher_name(m);
    return r;
}

MissingGainReport compare_missing_gain(const CorpusSpec& spec, std::vector<double> thresholds,
                                       std::uint64_t seed, const MissingParams& mp) {
    if (spec.subjects == 0) throw std::invalid_argument("empty population");
    const SeedSchedule seeds = draw_seeds(spec, seed);  // same population as run_bench
    const std::vector<Constellation> subjects = make_population(spec, seeds.subjects);
    const std::vector<Constellation> probes = make_probes(spec, subjects, seeds.perturbs);

    std::vector<double> plain(spec.subjects, 0.0), adjusted(spec.subjects, 0.0);
    double forgiven_total = 0.0;
    std::size_t hypotheses_total = 0;
    std::exception_ptr err;
    const auto n = static_cast<std::ptrdiff_t>(spec.subjects);
#pragma omp parallel for schedule(dynamic) if (spec.parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            const DirectMatchResult r = direct_vicinity_match(
                probes[i], subjects[i], spec.rho, spec.t_score, spec.params, mp);
            plain[i] = static_cast<double>(r.unmatched_plain);
            adjusted[i] = static_cast<double>(r.unmatched_adjusted);
            double forgiven = 0.0;
            for (const MissingHypothesis& h : r.report.hypotheses) forgiven += h.forgiven_penalty;
#pragma omp critical
            {
                forgiven_total += forgiven;
                hypotheses_total += r.report.hypotheses.size();
            }
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    MissingGainReport r;
    std::sort(thresholds.begin(), thresholds.end());
    r.thresholds = thresholds;
    for (double tau : thresholds) {
        std::size_t fp = 0, fa = 0;
        for (std::size_t i = 0; i < spec.subjects; ++i) {
            fp += plain[i] > tau;
            fa += adjusted[i] > tau;
        }
        r.frr_plain.push_back(static_cast<double>(fp) / static_cast<double>(spec.subjects));
        r.frr_with_missing.push_back(static_cast<double>(fa) / static_cast<double>(spec.subjects));
    }
    r.forgiven_total = forgiven_total;
    r.hypotheses_total = hypotheses_total;
    for (std::size_t i = 0; i < spec.subjects; ++i) {
        r.pairs.push_back({genuine_label(i, "/plain"), true, plain[i]});
        r.pairs.push_back({genuine_label(i, "/adjusted"), true, adjusted[i]});
    }
    r.config = config_echo(spec, seed, thresholds);
    r.config["eps_miss"] = mp.eps_miss;
    r.config["k_max"] = mp.k_max;
    r.config["penalty_dominance_ratio"] = mp.penalty_dominance_ratio;
    r.config["spurious_direction"] = mp.spurious_direction;
    return r;
}

}  // namespace constel::bench
