#include "constel/missing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "constel/assignment.hpp"

namespace constel {

namespace {

void validate(const MissingParams& mp) {
    if (mp.eps_miss <= 0.0) throw std::invalid_argument("eps_miss must be positive");
    if (mp.k_max < 1 || mp.k_max > 2) throw std::invalid_argument("k_max must be 1 or 2");
    if (mp.penalty_dominance_ratio <= 0.0)
        throw std::invalid_argument("penalty_dominance_ratio must be positive");
}

}  // namespace

ScoreDecomposition score_decompose(const VicinityScore& sc, const ScoreParams& p,
                                   double dominance_ratio) {
    ScoreDecomposition d;
    d.associated_cost = sc.assignment.total_cost;
    // Net of prior forgiveness so the parts always sum back to value.
    d.penalty_cost = static_cast<double>(sc.nar + sc.nas) * p.k_na - sc.forgiven;
    d.penalty_dominated = d.penalty_cost > 0.0 &&
                          d.associated_cost <= dominance_ratio * d.penalty_cost;
    return d;
}

VicinityPairing best_pair_scores(const std::vector<Vicinity>& template_vics,
                                 const std::vector<Vicinity>& candidate_vics,
                                 const ScoreParams& p) {
    if (candidate_vics.empty()) throw std::invalid_argument("no candidate vicinities");
    VicinityPairing out;
    out.best_candidate.resize(template_vics.size(), 0);
    out.scores.resize(template_vics.size());
    for (std::size_t i = 0; i < template_vics.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < candidate_vics.size(); ++j) {
            VicinityScore s = vicinity_score(template_vics[i], candidate_vics[j], p);
            if (s.value < best) {
                best = s.value;
                out.best_candidate[i] = j;
                out.scores[i] = std::move(s);
            }
        }
    }
    return out;
}

MissingReport detect_missing(const std::vector<Vicinity>& template_vics,
                             const std::vector<Vicinity>& candidate_vics,
                             const ScoreParams& sp, const MissingParams& mp) {
    validate(mp);
    MissingReport report;
    report.params = mp;
    report.k_na = sp.k_na;
    if (template_vics.empty() || candidate_vics.empty()) return report;

    // Minimum-cost bijection between the vicinity sets. Independent per-row
    // minima let a near-coincidental geometric match steal a candidate from
    // its true partner, silencing that supporter; the global optimum cannot.
    const std::size_t nc = candidate_vics.size();
    std::vector<VicinityScore> all(template_vics.size() * nc);
    CostMatrix m = make_cost_matrix(template_vics.size(), nc);
    for (std::size_t i = 0; i < template_vics.size(); ++i)
        for (std::size_t j = 0; j < nc; ++j) {
            all[i * nc + j] = vicinity_score(template_vics[i], candidate_vics[j], sp);
            m.at(i, j) = all[i * nc + j].value;
        }
    const Assignment paired = solve(pad_to_square(std::move(m)));

    struct Occurrence {
        Vec2 pos;
        double theta;
        std::pair<std::size_t, std::size_t> link;  // (template vic, candidate vic)
        bool spurious;
    };
    std::vector<Occurrence> occ;
    const auto eligible = [&](const VicinityScore& sc) {
        if (!score_decompose(sc, sp, mp.penalty_dominance_ratio).penalty_dominated) return false;
        const std::size_t nr = sc.assignment.unassigned_rows.size();
        if (nr >= 1 && nr <= mp.k_max) return true;
        const std::size_t ncol = sc.assignment.unassigned_cols.size();
        return mp.spurious_direction && ncol >= 1 && ncol <= mp.k_max;
    };
    const auto emit = [&](std::size_t i, std::size_t j) {
        const VicinityScore& sc = all[i * nc + j];
        const Minutia& anchor = candidate_vics[j].center;

        const auto& rows = sc.assignment.unassigned_rows;
        if (!rows.empty() && rows.size() <= mp.k_max)
            for (std::size_t r : rows) {
                const Minutia g = from_local_frame(anchor, template_vics[i].members[r]);
                occ.push_back({{g.x, g.y}, g.theta, {i, j}, false});
            }
        if (mp.spurious_direction) {
            const auto& cols = sc.assignment.unassigned_cols;
            if (!cols.empty() && cols.size() <= mp.k_max)
                for (std::size_t c : cols) {
                    const Minutia g = from_local_frame(anchor, candidate_vics[j].members[c]);
                    occ.push_back({{g.x, g.y}, g.theta, {i, j}, true});
                }
        }
    };
    // Emit through every candidate tying the reference score, not just one of
    // them. A vicinity reduced to its center matches every such candidate at
    // exactly k_na per absence, so which one the bijection picked is arbitrary,
    // and only the true partner's frame places the occurrence correctly.
    const auto emit_ties = [&](std::size_t i, double ref) {
        const double slack = 1e-9 * std::max(1.0, ref);
        for (std::size_t l = 0; l < nc; ++l)
            if (std::abs(all[i * nc + l].value - ref) <= slack && eligible(all[i * nc + l]))
                emit(i, l);
    };
    for (const auto& [i, j] : paired.pairs)
        if (eligible(all[i * nc + j])) emit_ties(i, all[i * nc + j].value);
    // Rows squeezed onto the virtual column still get their best dominated
    // explanation considered; identical inputs never produce such rows.
    for (const std::size_t i : paired.unassigned_rows) {
        double ref = std::numeric_limits<double>::infinity();
        for (std::size_t l = 0; l < nc; ++l)
            if (eligible(all[i * nc + l])) ref = std::min(ref, all[i * nc + l].value);
        if (std::isfinite(ref)) emit_ties(i, ref);
    }

    // Single-linkage clustering at eps_miss, per direction.
    std::vector<std::size_t> root(occ.size());
    std::iota(root.begin(), root.end(), 0);
    const auto find = [&](std::size_t x) {
        while (root[x] != x) x = root[x] = root[root[x]];
        return x;
    };
    for (std::size_t i = 0; i < occ.size(); ++i)
        for (std::size_t j = i + 1; j < occ.size(); ++j)
            if (occ[i].spurious == occ[j].spurious &&
                dist(occ[i].pos, occ[j].pos) <= mp.eps_miss)
                root[find(i)] = find(j);

    std::vector<std::size_t> seen;  // roots in first-occurrence order
    for (std::size_t i = 0; i < occ.size(); ++i) {
        const std::size_t r = find(i);
        if (std::find(seen.begin(), seen.end(), r) != seen.end()) continue;
        seen.push_back(r);

        std::vector<std::size_t> members;
        for (std::size_t j = 0; j < occ.size(); ++j)
            if (find(j) == r) members.push_back(j);

        // Trim until every member sits within eps_miss of the mean, so the
        // stored position honestly represents all supporters.
        Vec2 mean{};
        for (;;) {
            mean = {0.0, 0.0};
            for (std::size_t j : members) mean += occ[j].pos;
            mean = (1.0 / static_cast<double>(members.size())) * mean;
            std::size_t worst = members.size();
            double worst_d = mp.eps_miss;
            for (std::size_t idx = 0; idx < members.size(); ++idx) {
                const double d = dist(occ[members[idx]].pos, mean);
                if (d > worst_d) {
                    worst_d = d;
                    worst = idx;
                }
            }
            if (worst == members.size()) break;
            members.erase(members.begin() + static_cast<std::ptrdiff_t>(worst));
        }

        std::vector<std::pair<std::size_t, std::size_t>> links;
        for (std::size_t j : members) links.push_back(occ[j].link);
        std::sort(links.begin(), links.end());
        std::vector<std::pair<std::size_t, std::size_t>> distinct = links;
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (distinct.size() < 2) continue;

        double sx = 0.0, sy = 0.0;
        for (std::size_t j : members) {
            sx += std::sin(occ[j].theta);
            sy += std::cos(occ[j].theta);
        }
        MissingHypothesis h;
        h.x = mean.x;
        h.y = mean.y;
        h.theta = canonical_angle(std::atan2(sx, sy));
        h.supporters = std::move(links);
        h.forgiven_penalty = static_cast<double>(members.size()) * sp.k_na;
        h.spurious = occ[members.front()].spurious;
        report.hypotheses.push_back(std::move(h));
    }
    return report;
}

MissingReport detect_missing(const Constellation& candidate, const Constellation& templ,
                             double rho, const ScoreParams& sp, const MissingParams& mp) {
    validate(mp);
    const std::vector<Vicinity> tv = extract_vicinities(templ, rho);
    const std::vector<Vicinity> cv = extract_vicinities(candidate, rho);
    if (tv.empty() || cv.empty()) {
        MissingReport empty;
        empty.params = mp;
        empty.k_na = sp.k_na;
        return empty;
    }
    return detect_missing(tv, cv, sp, mp);
}

std::vector<VicinityScore> adjust_scores(std::vector<VicinityScore> scores,
                                         const MissingReport& report) {
    std::vector<double> waived(scores.size(), 0.0);
    for (const MissingHypothesis& h : report.hypotheses)
        for (const auto& [tvi, cvi] : h.supporters) {
            (void)cvi;
            if (tvi >= scores.size())
                throw std::out_of_range("missing-report supporter references vicinity " +
                                        std::to_string(tvi) + " of " +
                                        std::to_string(scores.size()));
            waived[tvi] += report.k_na;
        }
    for (std::size_t i = 0; i < scores.size(); ++i) {
        VicinityScore& sc = scores[i];
        // Pre-forgiveness penalty, reconstructed so the report's k_na only
        // enters through the waived amounts.
        const double penalty = sc.value - sc.assignment.total_cost + sc.forgiven;
        sc.forgiven = std::min(waived[i], penalty);  // floor: value never drops below associated cost
        sc.value = sc.assignment.total_cost + penalty - sc.forgiven;
    }
    return scores;
}

DirectMatchResult direct_vicinity_match(const Constellation& candidate, const Constellation& templ,
                                        double rho, double t_score,
                                        const ScoreParams& sp, const MissingParams& mp) {
    validate(mp);
    const std::vector<Vicinity> tv = extract_vicinities(templ, rho);
    const std::vector<Vicinity> cv = extract_vicinities(candidate, rho);
    DirectMatchResult r;
    if (tv.empty() || cv.empty()) {
        r.unmatched_plain = r.unmatched_adjusted = tv.size();
        r.report.params = mp;
        r.report.k_na = sp.k_na;
        return r;
    }
    const VicinityPairing pairing = best_pair_scores(tv, cv, sp);
    r.report = detect_missing(tv, cv, sp, mp);
    const std::vector<VicinityScore> adjusted = adjust_scores(pairing.scores, r.report);
    for (std::size_t i = 0; i < tv.size(); ++i) {
        if (pairing.scores[i].value >= t_score) ++r.unmatched_plain;
        if (adjusted[i].value >= t_score) ++r.unmatched_adjusted;
    }
    return r;
}

}  // namespace constel
