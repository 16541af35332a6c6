// Vicinity extraction, vicinity-vs-vicinity scoring, representative-DB
// construction, binary feature vectors and Hamming comparison.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "constel/assignment.hpp"
#include "constel/core.hpp"

namespace constel {

/// A center minutia plus every minutia within the extraction radius,
/// re-expressed in the center's local frame. The center's own image at
/// (0, 0, 0) is always a member.
struct Vicinity {
    Minutia center;                 ///< global frame
    std::vector<Minutia> members;   ///< local frame, center image included
    int order = 1;                  ///< 1 = minutiae, 2 = vicinity barycenters
    std::size_t source_index = 0;   ///< index of the center in its source constellation
    double rho = 0.0;               ///< radius used at extraction

    std::size_t size() const { return members.size(); }
    /// Member count excluding the center's origin image.
    std::size_t neighbor_count() const { return members.empty() ? 0 : members.size() - 1; }
};

/// Result of matching two vicinities. Lower value = more similar.
/// value = assignment.total_cost + (nar + nas) * k_na - forgiven.
struct VicinityScore {
    double value = 0.0;
    std::size_t nar = 0;      ///< members of the first vicinity left unassociated
    std::size_t nas = 0;      ///< members of the second vicinity left unassociated
    Assignment assignment;    ///< surviving (post-gating) associations
    double forgiven = 0.0;    ///< penalty waived by missing-minutia analysis

    double associated_cost() const { return assignment.total_cost; }
};

/// One vicinity per minutia; membership is strict (distance < rho).
std::vector<Vicinity> extract_vicinities(const Constellation& c, double rho);

/// Scores two same-order vicinities: builds the member score matrix, pads,
/// solves the assignment, dissolves pairs with score > p.s_max (counted in
/// both nar and nas) and adds (nar + nas) * k_na.
VicinityScore vicinity_score(const Vicinity& a, const Vicinity& b, const ScoreParams& p);

/// N reference vicinities, pairwise dissimilar, unrelated to enrolled data.
/// Every extracted vicinity is scored against each rep to produce one bit.
struct RepresentativeDB {
    int order = 1;
    double rho = 0.0;
    std::size_t l_min = 3;    ///< rep member-count lower bound (center image included)
    std::size_t l_max = 8;    ///< rep member-count upper bound
    double d_min = 0.0;       ///< pairwise dissimilarity threshold
    ScoreParams params;
    std::vector<Vicinity> reps;
    std::uint64_t id = 0;     ///< content hash; recomputed by refresh_id()

    std::size_t size() const { return reps.size(); }
};

/// Content hash of a DB (params + reps, bit-exact over the doubles).
std::uint64_t db_content_hash(const RepresentativeDB& db);
void refresh_id(RepresentativeDB& db);

/// Greedy seeded selection from pre-extracted candidate vicinities: keep a
/// candidate iff its member count lies in [l_min, l_max] and it scores
/// > d_min against every rep kept so far; stop at n_target. Throws
/// std::runtime_error reporting the kept count if candidates run out.
RepresentativeDB build_representative_db(std::vector<Vicinity> candidates, int order,
                                         double rho, std::size_t l_min, std::size_t l_max,
                                         double d_min, std::size_t n_target,
                                         const ScoreParams& p, std::uint64_t rng_seed);

/// Convenience wrapper: extracts order-1 vicinities from every constellation
/// of the pool and selects from the union.
RepresentativeDB build_representative_db(const std::vector<Constellation>& pool,
                                         double rho, std::size_t l_min, std::size_t l_max,
                                         double d_min, std::size_t n_target,
                                         const ScoreParams& p, std::uint64_t rng_seed);

/// N-bit template: bit i is set iff some extracted vicinity scores below
/// threshold against rep i. Comparable only across equal db_id and threshold.
struct FeatureVector {
    std::vector<std::uint8_t> bits;  ///< one 0/1 entry per rep
    double threshold = 0.0;
    std::uint64_t db_id = 0;

    std::size_t size() const { return bits.size(); }
};

/// OpenMP kernel: scoring is parallel across reps.
FeatureVector compute_feature_vector(const Constellation& c, const RepresentativeDB& db, double t);
/// Serial reference implementation; results are identical bit for bit.
FeatureVector compute_feature_vector_serial(const Constellation& c, const RepresentativeDB& db, double t);
/// Lower-level entry over pre-extracted vicinities (required for order-2 DBs).
FeatureVector compute_feature_vector(const std::vector<Vicinity>& vics, const RepresentativeDB& db,
                                     double t, bool parallel = true);

/// Number of differing bits. Throws std::invalid_argument("incomparable
/// vectors") on mismatched db_id, threshold or length.
std::size_t hamming(const FeatureVector& u, const FeatureVector& v);

/// Lowercase hex encoding, most significant bit of the first digit = bit 0.
std::string feature_vector_hex(const FeatureVector& v);
std::vector<std::uint8_t> bits_from_hex(const std::string& hex, std::size_t nbits);

}  // namespace constel
