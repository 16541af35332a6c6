// Vicinities of vicinities: significance filtering, barycenter reduction,
// second-order extraction and the double-pass match decision.
#pragma once

#include <cstddef>
#include <vector>

#include "constel/core.hpp"
#include "constel/vicinity.hpp"

namespace constel {

struct SecondOrderParams {
    double rho1 = 75.0;
    double rho2 = 150.0;       ///< must exceed rho1
    std::size_t l_min = 2;     ///< significance lower bound on neighbor count (center excluded)
    std::size_t l_max = 8;     ///< significance upper bound
    std::size_t t1 = 16;       ///< first-order Hamming decision threshold
    std::size_t t2 = 16;       ///< second-order Hamming decision threshold
};

/// Throws std::invalid_argument unless rho2 > rho1 > 0 and l_min <= l_max.
void validate(const SecondOrderParams& p);

/// Keeps vicinities whose neighbor count lies in [l_min, l_max], then
/// enforces pairwise distinctness: in order of descending member count
/// (ties to the lower source_index), a vicinity is dropped when its center
/// lies strictly inside an already-kept vicinity's radius. Output is sorted
/// by source_index.
std::vector<Vicinity> filter_significant(std::vector<Vicinity> vs,
                                         std::size_t l_min, std::size_t l_max);

/// Mean member position mapped back to the global frame; orientation is the
/// center minutia's theta.
Minutia barycenter(const Vicinity& v);

/// extract -> filter_significant -> barycenters -> re-extract at rho2.
/// Returned vicinities have order = 2 and source_index into the barycenter
/// list; scoring reuses vicinity_score unchanged.
std::vector<Vicinity> extract_second_order(const Constellation& c, const SecondOrderParams& p);

struct TwoPassResult {
    bool match = false;
    std::size_t hamming1 = 0;
    std::size_t hamming2 = 0;
};

/// Double-pass decision: match iff hamming1 <= t1 AND hamming2 <= t2.
/// db1 must be an order-1 DB at rho1, db2 an order-2 DB at rho2;
/// t_score1/t_score2 are the binarization thresholds for the two passes.
TwoPassResult match_two_pass(const Constellation& candidate, const Constellation& templ,
                             const RepresentativeDB& db1, const RepresentativeDB& db2,
                             const SecondOrderParams& p, double t_score1, double t_score2);

}  // namespace constel
