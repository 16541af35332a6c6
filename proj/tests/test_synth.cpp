#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>
#include <vector>

#include "constel/core.hpp"
#include "constel/spring.hpp"
#include "constel/synth.hpp"

using namespace constel;

namespace {

std::vector<Vec2> positions(const Constellation& c) {
    std::vector<Vec2> pts;
    for (const Minutia& m : c.minutiae) pts.push_back({m.x, m.y});
    return pts;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("rng primitives") {
    synth::Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    synth::Rng g(2);
    double sum = 0.0, sum_sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const double x = g.normal(2.0);
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(sum_sq / n - mean * mean);
    CHECK(std::abs(mean) < 0.06);
    CHECK(sd == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("generate: sizes, bounds, separation, determinism") {
    const Constellation empty = synth::generate(0, 512, 512, 10, 5);
    CHECK(empty.size() == 0);
    const Constellation one = synth::generate(1, 512, 512, 10, 5);
    CHECK(one.size() == 1);

    const Constellation c = synth::generate(40, 512, 512, 12, 99);
    REQUIRE(c.size() == 40);
    for (const Minutia& m : c.minutiae) {
        CHECK(m.x >= 0.0);
        CHECK(m.x <= 512.0);
        CHECK(m.y >= 0.0);
        CHECK(m.y <= 512.0);
        CHECK(m.theta >= 0.0);
        CHECK(m.theta < kTwoPi);
    }
    for (std::size_t i = 0; i < c.size(); ++i)
        for (std::size_t j = i + 1; j < c.size(); ++j)
            CHECK(std::hypot(c.minutiae[i].x - c.minutiae[j].x,
                             c.minutiae[i].y - c.minutiae[j].y) >= 12.0);

    const Constellation again = synth::generate(40, 512, 512, 12, 99);
    REQUIRE(again.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(again.minutiae[i].x == c.minutiae[i].x);
        CHECK(again.minutiae[i].y == c.minutiae[i].y);
        CHECK(again.minutiae[i].theta == c.minutiae[i].theta);
    }
    const Constellation other = synth::generate(40, 512, 512, 12, 100);
    bool differs = false;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (other.minutiae[i].x != c.minutiae[i].x) differs = true;
    CHECK(differs);
}

TEST_CASE("generate: impossible separation throws") {
    CHECK_THROWS_AS(synth::generate(100, 10, 10, 50, 1), std::runtime_error);
}

TEST_CASE("perturb: all-zero spec is the identity") {
    const Constellation c = synth::generate(25, 512, 512, 10, 7);
    const auto [out, gt] = synth::perturb(c, synth::PerturbSpec{});
    REQUIRE(out.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(out.minutiae[i].x == c.minutiae[i].x);
        CHECK(out.minutiae[i].y == c.minutiae[i].y);
        CHECK(out.minutiae[i].theta == c.minutiae[i].theta);
    }
    CHECK(gt.removed_indices.empty());
    CHECK(gt.added_indices.empty());
    CHECK(gt.transform.dx == 0.0);
    CHECK(gt.transform.dy == 0.0);
    CHECK(gt.transform.theta == 0.0);
}

TEST_CASE("perturb: pure rigid transform is recovered by the alignment oracle") {
    const Constellation c = synth::generate(20, 512, 512, 10, 11);
    synth::PerturbSpec spec;
    spec.transform = RigidTransform{31.0, -17.0, 0.8};
    const auto [out, gt] = synth::perturb(c, spec);
    REQUIRE(out.size() == c.size());
    CHECK(gt.transform.dx == 31.0);
    CHECK(gt.transform.theta == 0.8);
    const KabschResult k = kabsch_align(positions(c), positions(out));
    CHECK(angle_diff(k.transform.theta, 0.8) < 1e-6);
    CHECK(std::abs(k.transform.dx - 31.0) < 1e-6);
    CHECK(std::abs(k.transform.dy - (-17.0)) < 1e-6);
    CHECK(k.residual_sq < 1e-6);
    for (std::size_t i = 0; i < c.size(); ++i)
        CHECK(angle_diff(out.minutiae[i].theta, canonical_angle(c.minutiae[i].theta + 0.8)) <
              1e-9);
}

TEST_CASE("perturb: random transform is drawn and echoed") {
    const Constellation c = synth::generate(15, 512, 512, 10, 13);
    synth::PerturbSpec spec;
    spec.transform.reset();
    spec.seed = 21;
    const auto [out, gt] = synth::perturb(c, spec);
    CHECK(std::abs(gt.transform.dx) <= synth::kRandomTransMax);
    CHECK(std::abs(gt.transform.dy) <= synth::kRandomTransMax);
    const KabschResult k = kabsch_align(positions(c), positions(out));
    CHECK(angle_diff(k.transform.theta, gt.transform.theta) < 1e-6);
    const bool nontrivial = std::abs(gt.transform.dx) > 1e-12 ||
                            std::abs(gt.transform.theta) > 1e-12;
    CHECK(nontrivial);
}

TEST_CASE("perturb: occlusion bookkeeping") {
    const Constellation c = synth::generate(18, 512, 512, 10, 17);
    synth::PerturbSpec spec;
    spec.occlusions = 4;
    spec.seed = 3;
    const auto [out, gt] = synth::perturb(c, spec);
    REQUIRE(out.size() == 14);
    REQUIRE(gt.removed_indices.size() == 4);
    std::set<std::size_t> removed(gt.removed_indices.begin(), gt.removed_indices.end());
    CHECK(removed.size() == 4);
    // Survivors keep their input order.
    std::size_t oi = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (removed.count(i)) continue;
        CHECK(out.minutiae[oi].x == c.minutiae[i].x);
        CHECK(out.minutiae[oi].y == c.minutiae[i].y);
        ++oi;
    }
    CHECK(oi == out.size());
}

TEST_CASE("perturb: occlusions must leave at least one minutia") {
    const Constellation c = synth::generate(3, 512, 512, 10, 19);
    synth::PerturbSpec spec;
    spec.occlusions = 3;
    CHECK_THROWS_AS(synth::perturb(c, spec), std::invalid_argument);
    spec.occlusions = 5;
    CHECK_THROWS_AS(synth::perturb(c, spec), std::invalid_argument);
    // Zero occlusions on an empty constellation is fine.
    const Constellation none = synth::generate(0, 512, 512, 10, 19);
    CHECK_NOTHROW(synth::perturb(none, synth::PerturbSpec{}));
}

TEST_CASE("perturb: spurious minutiae are appended and indexed") {
    const Constellation c = synth::generate(10, 512, 512, 10, 23);
    synth::PerturbSpec spec;
    spec.spurious = 3;
    spec.seed = 5;
    const auto [out, gt] = synth::perturb(c, spec);
    REQUIRE(out.size() == 13);
    REQUIRE(gt.added_indices.size() == 3);
    for (const std::size_t idx : gt.added_indices) CHECK(idx >= 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(out.minutiae[i].x == c.minutiae[i].x);
        CHECK(out.minutiae[i].y == c.minutiae[i].y);
    }
}

TEST_CASE("perturb: jitter moves points by roughly sigma") {
    const Constellation c = synth::generate(200, 2048, 2048, 8, 29);
    synth::PerturbSpec spec;
    spec.jitter_sigma = 3.0;
    spec.seed = 31;
    const auto [out, gt] = synth::perturb(c, spec);
    REQUIRE(out.size() == c.size());
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double dx = out.minutiae[i].x - c.minutiae[i].x;
        const double dy = out.minutiae[i].y - c.minutiae[i].y;
        CHECK(std::hypot(dx, dy) < 3.0 * 6.0);  // 6 sigma
        sum_sq += dx * dx + dy * dy;
    }
    const double rms = std::sqrt(sum_sq / (2.0 * static_cast<double>(c.size())));
    CHECK(rms == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("perturb: determinism is bit exact") {
    const Constellation c = synth::generate(30, 512, 512, 10, 37);
    synth::PerturbSpec spec;
    spec.jitter_sigma = 2.0;
    spec.theta_jitter_sigma = 0.05;
    spec.occlusions = 3;
    spec.spurious = 2;
    spec.transform.reset();
    spec.distortion_amp = 4.0;
    spec.distortion_scale = 90.0;
    spec.seed = 41;
    const auto [o1, g1] = synth::perturb(c, spec);
    const auto [o2, g2] = synth::perturb(c, spec);
    REQUIRE(o1.size() == o2.size());
    for (std::size_t i = 0; i < o1.size(); ++i) {
        CHECK(o1.minutiae[i].x == o2.minutiae[i].x);
        CHECK(o1.minutiae[i].y == o2.minutiae[i].y);
        CHECK(o1.minutiae[i].theta == o2.minutiae[i].theta);
    }
    CHECK(g1.transform.dx == g2.transform.dx);
    CHECK(g1.transform.theta == g2.transform.theta);
    CHECK(g1.removed_indices == g2.removed_indices);
    CHECK(g1.added_indices == g2.added_indices);
}

TEST_CASE("perturb: distortion displaces by at most the amplitude") {
    const Constellation c = synth::generate(50, 512, 512, 10, 43);
    synth::PerturbSpec spec;
    spec.distortion_amp = 5.0;
    spec.distortion_scale = 120.0;
    spec.seed = 47;
    const auto [out, gt] = synth::perturb(c, spec);
    REQUIRE(out.size() == c.size());
    bool moved = false;
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double d = std::hypot(out.minutiae[i].x - c.minutiae[i].x,
                                    out.minutiae[i].y - c.minutiae[i].y);
        CHECK(d <= 5.0 * std::numbers::sqrt2 + 1e-9);
        if (d > 1e-12) moved = true;
    }
    CHECK(moved);
}

}  // TEST_SUITE
