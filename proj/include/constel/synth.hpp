// Seeded synthetic constellation generation and perturbation for tests and
// benchmarks.
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "constel/core.hpp"

namespace constel::synth {

/// Seeded generator on mt19937_64 with explicit Box-Muller and Fisher-Yates;
/// std::*_distribution output is not reproducible across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal(double sigma);
    std::uint64_t next() { return eng_(); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i)
            std::swap(v[i - 1], v[index(i)]);
    }

private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// Translation half-range used when drawing a "random" rigid transform.
inline constexpr double kRandomTransMax = 128.0;

struct PerturbSpec {
    /// Rigid pose applied after jitter; nullopt draws a random one. Defaults
    /// to the identity so an all-zero spec is a no-op.
    std::optional<RigidTransform> transform = RigidTransform{};
    double jitter_sigma = 0.0;        ///< Gaussian position jitter (px)
    double theta_jitter_sigma = 0.0;  ///< Gaussian orientation jitter (rad)
    std::size_t occlusions = 0;       ///< minutiae removed at random
    std::size_t spurious = 0;         ///< minutiae inserted at random
    double distortion_amp = 0.0;      ///< sinusoidal displacement amplitude (px)
    double distortion_scale = 0.0;    ///< displacement wavelength (px)
    std::uint64_t seed = 0;
};

struct GroundTruth {
    RigidTransform transform;                  ///< the transform actually applied
    std::vector<std::size_t> removed_indices;  ///< into the input constellation
    std::vector<std::size_t> added_indices;    ///< positions in the output
};

/// n minutiae uniform over [0,width]x[0,height] with pairwise separation
/// >= min_sep and uniform orientations. Throws after 10^6 failed placement
/// attempts.
Constellation generate(std::size_t n, double width, double height, double min_sep,
                       std::uint64_t seed);

/// Applies, in order: smooth sinusoidal distortion, position/orientation
/// jitter, the rigid transform, occlusion, spurious insertion. Survivors keep
/// their input order; spurious minutiae are appended.
std::pair<Constellation, GroundTruth> perturb(const Constellation& c, const PerturbSpec& spec);

}  // namespace constel::synth
