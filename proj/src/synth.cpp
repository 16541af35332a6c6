#include "constel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace constel::synth {

double Rng::normal(double sigma) {
    if (have_spare_) {
        have_spare_ = false;
        return sigma * spare_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return sigma * (r * std::cos(kTwoPi * u2));
}

Constellation generate(std::size_t n, double width, double height, double min_sep,
                       std::uint64_t seed) {
    if (width <= 0.0 || height <= 0.0) throw std::invalid_argument("box must have positive area");
    if (min_sep < 0.0) throw std::invalid_argument("min_sep must be non-negative");

    Rng rng(seed);
    std::vector<Minutia> ms;
    ms.reserve(n);
    std::size_t attempts = 0;
    while (ms.size() < n) {
        if (++attempts > 1000000)
            throw std::runtime_error("placement failed after 1e6 attempts; box too dense for "
                                     "min_sep " + std::to_string(min_sep));
        const double x = rng.uniform(0.0, width);
        const double y = rng.uniform(0.0, height);
        const bool clear = std::none_of(ms.begin(), ms.end(), [&](const Minutia& m) {
            return dist({x, y}, m.pos()) < min_sep;
        });
        if (clear) ms.emplace_back(x, y, rng.uniform(0.0, kTwoPi));
    }
    char id[32];
    std::snprintf(id, sizeof id, "synth-%016llx", static_cast<unsigned long long>(seed));
    return make_constellation(id, std::move(ms));
}

std::pair<Constellation, GroundTruth> perturb(const Constellation& c, const PerturbSpec& spec) {
    if (spec.occlusions > 0 && spec.occlusions >= c.size())
        throw std::invalid_argument("occlusions must be fewer than the constellation size");

    Rng rng(spec.seed);
    GroundTruth gt;
    gt.transform = spec.transform ? *spec.transform
                                  : RigidTransform{rng.uniform(-kRandomTransMax, kRandomTransMax),
                                                   rng.uniform(-kRandomTransMax, kRandomTransMax),
                                                   rng.uniform(0.0, kTwoPi)};
    std::vector<Minutia> ms = c.minutiae;

    if (spec.distortion_amp > 0.0 && spec.distortion_scale > 0.0) {
        const double w = kTwoPi / spec.distortion_scale;
        const double pa = rng.uniform(0.0, kTwoPi), pb = rng.uniform(0.0, kTwoPi);
        for (Minutia& m : ms)
            m = {m.x + spec.distortion_amp * std::sin(w * m.y + pa),
                 m.y + spec.distortion_amp * std::sin(w * m.x + pb), m.theta};
    }
    if (spec.jitter_sigma > 0.0)
        for (Minutia& m : ms)
            m = {m.x + rng.normal(spec.jitter_sigma), m.y + rng.normal(spec.jitter_sigma), m.theta};
    if (spec.theta_jitter_sigma > 0.0)
        for (Minutia& m : ms) m = {m.x, m.y, m.theta + rng.normal(spec.theta_jitter_sigma)};
    for (Minutia& m : ms) m = apply_rigid(m, gt.transform);

    if (spec.occlusions > 0) {
        std::vector<std::size_t> idx(ms.size());
        std::iota(idx.begin(), idx.end(), 0);
        rng.shuffle(idx);
        gt.removed_indices.assign(idx.begin(),
                                  idx.begin() + static_cast<std::ptrdiff_t>(spec.occlusions));
        std::sort(gt.removed_indices.begin(), gt.removed_indices.end());
        for (auto it = gt.removed_indices.rbegin(); it != gt.removed_indices.rend(); ++it)
            ms.erase(ms.begin() + static_cast<std::ptrdiff_t>(*it));
    }

    if (spec.spurious > 0) {
        double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
        if (!ms.empty()) {
            lo_x = hi_x = ms.front().x;
            lo_y = hi_y = ms.front().y;
            for (const Minutia& m : ms) {
                lo_x = std::min(lo_x, m.x);
                hi_x = std::max(hi_x, m.x);
                lo_y = std::min(lo_y, m.y);
                hi_y = std::max(hi_y, m.y);
            }
        }
        for (std::size_t i = 0; i < spec.spurious; ++i) {
            for (;;) {
                const double x = rng.uniform(lo_x, hi_x);
                const double y = rng.uniform(lo_y, hi_y);
                const bool clear = std::none_of(ms.begin(), ms.end(), [&](const Minutia& m) {
                    return dist({x, y}, m.pos()) < kDupEpsilon;
                });
                if (!clear) continue;
                gt.added_indices.push_back(ms.size());
                ms.emplace_back(x, y, rng.uniform(0.0, kTwoPi));
                break;
            }
        }
    }
    return {make_constellation(c.id, std::move(ms)), gt};
}

}  // namespace constel::synth
