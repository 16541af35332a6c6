#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "constel/core.hpp"
#include "constel/synth.hpp"
#include "oracles.hpp"

using namespace constel;
using std::numbers::pi;

TEST_SUITE("core") {

TEST_CASE("angle_diff basics") {
    CHECK(angle_diff(0.0, 0.0) == 0.0);
    CHECK(angle_diff(0.1, kTwoPi - 0.1) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(angle_diff(pi / 2, 0.0) == doctest::Approx(pi / 2));
}

TEST_CASE("angle_diff range and antisymmetry against the complex oracle") {
    synth::Rng rng(101);
    for (int i = 0; i < 2000; ++i) {
        const double a = rng.uniform(-20.0, 20.0), b = rng.uniform(-20.0, 20.0);
        const double d = angle_diff(a, b);
        CHECK(d > -pi);
        CHECK(d <= pi);
        CHECK(d == doctest::Approx(oracles::angle_diff_oracle(a, b)).epsilon(1e-9));
        if (std::abs(std::abs(d) - pi) > 1e-9)
            CHECK(angle_diff(b, a) == doctest::Approx(-d).epsilon(1e-12));
    }
}

TEST_CASE("canonical_angle lands in [0, 2pi)") {
    synth::Rng rng(102);
    for (int i = 0; i < 2000; ++i) {
        const double r = canonical_angle(rng.uniform(-50.0, 50.0));
        CHECK(r >= 0.0);
        CHECK(r < kTwoPi);
    }
    CHECK(canonical_angle(kTwoPi) == 0.0);
    CHECK(canonical_angle(-1e-18) < kTwoPi);  // fmod rounding edge
}

TEST_CASE("minutia constructor canonicalizes theta") {
    const Minutia m(1.0, 2.0, -pi / 2);
    CHECK(m.theta == doctest::Approx(3 * pi / 2));
}

TEST_CASE("apply_rigid examples") {
    const Vec2 p{1.0, 0.0};
    const Vec2 r0 = apply_rigid(p, {0.0, 0.0, 0.0});
    CHECK(r0.x == doctest::Approx(1.0));
    CHECK(r0.y == doctest::Approx(0.0).epsilon(1e-12));
    const Vec2 r1 = apply_rigid(p, {0.0, 0.0, pi / 2});
    CHECK(r1.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r1.y == doctest::Approx(1.0));
    const Vec2 r2 = apply_rigid(p, {3.0, 4.0, pi / 2});
    CHECK(r2.x == doctest::Approx(3.0));
    CHECK(r2.y == doctest::Approx(5.0));
}

TEST_CASE("rigid inverse and composition") {
    synth::Rng rng(103);
    for (int i = 0; i < 500; ++i) {
        const RigidTransform t{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                               rng.uniform(0.0, kTwoPi)};
        const RigidTransform u{rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                               rng.uniform(0.0, kTwoPi)};
        const Vec2 p{rng.uniform(-50.0, 50.0), rng.uniform(-50.0, 50.0)};
        const Vec2 back = t.inverse().apply(t.apply(p));
        CHECK(norm(back - p) < 1e-9);
        const Vec2 both = t.then(u).apply(p);
        const Vec2 seq = u.apply(t.apply(p));
        CHECK(norm(both - seq) < 1e-9);
    }
}

TEST_CASE("to_local_frame examples") {
    const Minutia id = to_local_frame({0, 0, 0}, {5, 2, 1});
    CHECK(id.x == doctest::Approx(5.0));
    CHECK(id.y == doctest::Approx(2.0));
    CHECK(id.theta == doctest::Approx(1.0));

    const Minutia origin = to_local_frame({5, 2, 1}, {5, 2, 1});
    CHECK(origin.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(origin.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(origin.theta == doctest::Approx(0.0).epsilon(1e-12));

    // Independent 2x2 rotation-matrix evaluation: rotate (0,3)-(0,0) by -pi/2
    // gives (cos(-pi/2)*0 - sin(-pi/2)*3, sin(-pi/2)*0 + cos(-pi/2)*3) = (3,0).
    const Minutia local = to_local_frame({0, 0, pi / 2}, {0, 3, pi / 2});
    CHECK(local.x == doctest::Approx(3.0));
    CHECK(local.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(local.theta == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("from_local_frame examples and round trip") {
    const Minutia id = from_local_frame({0, 0, 0}, {5, 2, 1});
    CHECK(id.x == doctest::Approx(5.0));
    const Minutia center = from_local_frame({5, 2, 1}, {0, 0, 0});
    CHECK(center.x == doctest::Approx(5.0));
    CHECK(center.y == doctest::Approx(2.0));
    CHECK(center.theta == doctest::Approx(1.0));

    synth::Rng rng(104);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Minutia c(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                        rng.uniform(0.0, kTwoPi));
        const Minutia m(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                        rng.uniform(0.0, kTwoPi));
        const Minutia back = from_local_frame(c, to_local_frame(c, m));
        worst = std::max({worst, std::abs(back.x - m.x), std::abs(back.y - m.y),
                          std::abs(angle_diff(back.theta, m.theta))});
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("frame invariance under a shared rigid transform") {
    synth::Rng rng(105);
    for (int i = 0; i < 500; ++i) {
        const Minutia c(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                        rng.uniform(0.0, kTwoPi));
        const Minutia m(rng.uniform(-100.0, 100.0), rng.uniform(-100.0, 100.0),
                        rng.uniform(0.0, kTwoPi));
        const RigidTransform t{rng.uniform(-128.0, 128.0), rng.uniform(-128.0, 128.0),
                               rng.uniform(0.0, kTwoPi)};
        const Minutia a = to_local_frame(c, m);
        const Minutia b = to_local_frame(apply_rigid(c, t), apply_rigid(m, t));
        CHECK(std::abs(a.x - b.x) < 1e-6);
        CHECK(std::abs(a.y - b.y) < 1e-6);
        CHECK(std::abs(angle_diff(a.theta, b.theta)) < 1e-6);
    }
}

TEST_CASE("minutia_score examples") {
    ScoreParams p;
    CHECK(minutia_score({1, 2, 3}, {1, 2, 3}, p) == 0.0);
    CHECK(minutia_score({0, 0, 0}, {3, 4, 0}, p) == doctest::Approx(25.0));
    p.sigma_x = 0.6;
    p.sigma_theta = 0.3;  // ratio 2
    CHECK(minutia_score({0, 0, 0}, {0, 0, pi}, p) == doctest::Approx(2 * pi * pi));
}

TEST_CASE("minutia_score is symmetric exactly") {
    synth::Rng rng(106);
    const ScoreParams p = default_score_params(75.0);
    for (int i = 0; i < 1000; ++i) {
        const Minutia a(rng.uniform(-75.0, 75.0), rng.uniform(-75.0, 75.0),
                        rng.uniform(0.0, kTwoPi));
        const Minutia b(rng.uniform(-75.0, 75.0), rng.uniform(-75.0, 75.0),
                        rng.uniform(0.0, kTwoPi));
        CHECK(minutia_score(a, b, p) == minutia_score(b, a, p));
    }
}

TEST_CASE("default_score_params ties penalties to rho") {
    const ScoreParams p = default_score_params(75.0);
    CHECK(p.k_na == doctest::Approx(75.0 * 75.0 / 4.0));
    CHECK(p.s_max == doctest::Approx(3.0 * 75.0 * 75.0 / 4.0));
    CHECK_THROWS_AS(default_score_params(0.0), std::invalid_argument);
}

TEST_CASE("make_constellation rejects coincident minutiae") {
    CHECK_THROWS_AS(make_constellation("d", {{1, 1, 0}, {1, 1 + 1e-9, 2}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(make_constellation("n", {{1, 1, 0}, {std::nan(""), 0, 0}}),
                    std::invalid_argument);
    const Constellation ok = make_constellation("ok", {{1, 1, 0}, {1, 1.001, 2}});
    CHECK(ok.size() == 2);
}

TEST_CASE("apply_rigid over a constellation keeps order and shifts theta") {
    const Constellation c = make_constellation("c", {{0, 0, 0}, {10, 0, 1}});
    const Constellation r = apply_rigid(c, {1.0, 2.0, pi / 2});
    REQUIRE(r.size() == 2);
    CHECK(r.minutiae[0].x == doctest::Approx(1.0));
    CHECK(r.minutiae[0].y == doctest::Approx(2.0));
    CHECK(r.minutiae[1].x == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.minutiae[1].y == doctest::Approx(12.0));
    CHECK(r.minutiae[1].theta == doctest::Approx(1.0 + pi / 2));
}

}  // TEST_SUITE
