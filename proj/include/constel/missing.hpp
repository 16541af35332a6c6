// Missing-minutia analysis: detect penalty-dominated vicinity scores, map
// unmatched members to global-frame hypotheses, cluster them across
// vicinities and forgive the explained penalties.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "constel/core.hpp"
#include "constel/vicinity.hpp"

namespace constel {

struct MissingParams {
    double eps_miss = 10.0;     ///< single-linkage clustering radius (px)
    std::size_t k_max = 2;      ///< max missing minutiae per vicinity, 1 or 2
    double penalty_dominance_ratio = 0.25;
    /// Also hypothesize spurious candidate minutiae (the symmetric direction).
    bool spurious_direction = false;
};

struct ScoreDecomposition {
    double associated_cost = 0.0;
    double penalty_cost = 0.0;
    bool penalty_dominated = false;
};

/// Splits a vicinity score into its associated and penalty parts.
/// penalty_dominated iff penalty_cost > 0 and
/// associated_cost <= dominance_ratio * penalty_cost.
ScoreDecomposition score_decompose(const VicinityScore& sc, const ScoreParams& p,
                                   double dominance_ratio = 0.25);

/// A hypothesized occluded minutia, in the candidate's global frame.
struct MissingHypothesis {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;    ///< circular mean of supporter orientations; reported, not decided on
    /// (template vicinity index, candidate vicinity index) per supporting
    /// occurrence; at least two distinct pairs.
    std::vector<std::pair<std::size_t, std::size_t>> supporters;
    double forgiven_penalty = 0.0;   ///< k_na per supporter occurrence
    bool spurious = false;           ///< candidate-side hypothesis (opt-in direction)
};

struct MissingReport {
    std::vector<MissingHypothesis> hypotheses;
    MissingParams params;
    double k_na = 0.0;

    bool empty() const { return hypotheses.empty(); }
};

/// Best-scoring candidate vicinity for each template vicinity (greedy,
/// independent per template vicinity; ties to the lowest candidate index).
/// scores[i] is vicinity_score(template_vics[i], candidate_vics[best[i]]).
struct VicinityPairing {
    std::vector<std::size_t> best_candidate;
    std::vector<VicinityScore> scores;
};

VicinityPairing best_pair_scores(const std::vector<Vicinity>& template_vics,
                                 const std::vector<Vicinity>& candidate_vics,
                                 const ScoreParams& p);

/// Full pipeline over two constellations: extract both vicinity sets, pair
/// them by minimum-cost bijection over vicinity scores, then hypothesize
/// template minutiae the candidate lost. Clusters with fewer than two
/// distinct supporting vicinity pairs are discarded.
MissingReport detect_missing(const Constellation& candidate, const Constellation& templ,
                             double rho, const ScoreParams& sp, const MissingParams& mp);

/// Same analysis over pre-extracted vicinities.
MissingReport detect_missing(const std::vector<Vicinity>& template_vics,
                             const std::vector<Vicinity>& candidate_vics,
                             const ScoreParams& sp, const MissingParams& mp);

/// Waives k_na per supporter occurrence from the referenced template-vicinity
/// scores, never below the associated-cost floor. Sets (not decrements) the
/// forgiven amount, so re-applying the same report is a no-op. Throws when a
/// supporter references an index outside scores.
std::vector<VicinityScore> adjust_scores(std::vector<VicinityScore> scores,
                                         const MissingReport& report);

/// Direct template-to-candidate vicinity match used by the CLI and the bench
/// harness: a template vicinity is unmatched when its best (optionally
/// forgiveness-adjusted) score is >= t_score.
struct DirectMatchResult {
    std::size_t unmatched_plain = 0;
    std::size_t unmatched_adjusted = 0;
    MissingReport report;
};

DirectMatchResult direct_vicinity_match(const Constellation& candidate, const Constellation& templ,
                                        double rho, double t_score,
                                        const ScoreParams& sp, const MissingParams& mp);

}  // namespace constel
