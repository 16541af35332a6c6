#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "constel/second_order.hpp"
#include "constel/synth.hpp"
#include "constel/vicinity.hpp"

using namespace constel;

namespace {

// A reusable cluster alphabet: local point patterns smaller than rho1, each
// with a distinctive shape. First entry is the cluster anchor at the origin.
std::vector<std::vector<Minutia>> pattern_alphabet(std::uint64_t seed) {
    synth::Rng rng(seed);
    std::vector<std::vector<Minutia>> out;
    for (int p = 0; p < 6; ++p) {
        std::vector<Minutia> pat{{0, 0, 0.5}};
        const std::size_t extra = 3 + rng.index(3);  // 4..6 points total
        for (std::size_t i = 0; i < extra; ++i)
            pat.emplace_back(rng.uniform(-34.0, 34.0), rng.uniform(-34.0, 34.0),
                             rng.uniform(0.0, kTwoPi));
        out.push_back(std::move(pat));
    }
    return out;
}

Constellation place_clusters(const std::string& id,
                             const std::vector<std::vector<Minutia>>& patterns,
                             const std::vector<std::size_t>& which,
                             const std::vector<Vec2>& layout) {
    std::vector<Minutia> ms;
    for (std::size_t i = 0; i < which.size(); ++i)
        for (const Minutia& m : patterns[which[i]])
            ms.emplace_back(layout[i].x + m.x, layout[i].y + m.y, m.theta);
    return make_constellation(id, std::move(ms));
}

}  // namespace

TEST_SUITE("second_order") {

TEST_CASE("params validation") {
    SecondOrderParams p;
    p.rho1 = 75.0;
    p.rho2 = 75.0;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
    p.rho2 = 150.0;
    CHECK_NOTHROW(validate(p));
    p.l_min = 9;
    p.l_max = 8;
    CHECK_THROWS_AS(validate(p), std::invalid_argument);
}

TEST_CASE("significance bounds empty out sparse inputs") {
    const Constellation c = make_constellation("c", {{0, 0, 0}, {200, 0, 0}, {400, 0, 0}});
    auto vs = extract_vicinities(c, 75.0);  // all origin-only
    CHECK(filter_significant(std::move(vs), 2, 8).empty());
}

TEST_CASE("overlap ties go to the lower source index") {
    // Two centers 50 px apart sharing one far neighbor each: equal counts.
    const Constellation c =
        make_constellation("c", {{0, 0, 0}, {50, 0, 0}, {-60, 0, 0}, {110, 0, 0}});
    auto vs = extract_vicinities(c, 75.0);
    // Counts: index 0 and 1 see two neighbors each, 2 and 3 only one.
    const auto kept = filter_significant(std::move(vs), 2, 8);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].source_index == 0);
}

TEST_CASE("kept centers are pairwise at least rho apart") {
    for (std::uint64_t seed : {401ull, 402ull, 403ull}) {
        const Constellation c = synth::generate(40, 512, 512, 10, seed);
        const auto kept = filter_significant(extract_vicinities(c, 75.0), 2, 8);
        for (std::size_t i = 0; i < kept.size(); ++i) {
            for (std::size_t j = i + 1; j < kept.size(); ++j)
                CHECK(dist(kept[i].center.pos(), kept[j].center.pos()) >= 75.0);
            CHECK(kept[i].neighbor_count() >= 2);
            CHECK(kept[i].neighbor_count() <= 8);
            if (i > 0) CHECK(kept[i - 1].source_index < kept[i].source_index);
        }
    }
}

TEST_CASE("barycenter examples and two-path consistency") {
    const Constellation lone = make_constellation("l", {{10, 20, 1}});
    const auto vs = extract_vicinities(lone, 75.0);
    const Minutia b0 = barycenter(vs[0]);
    CHECK(b0.x == doctest::Approx(10.0));
    CHECK(b0.y == doctest::Approx(20.0));
    CHECK(b0.theta == doctest::Approx(1.0));

    // Two members symmetric about the center: barycenter at the center.
    const Constellation sym = make_constellation("s", {{100, 100, 2}, {130, 100, 0}, {70, 100, 0}});
    const Minutia bs = barycenter(extract_vicinities(sym, 75.0)[0]);
    CHECK(bs.x == doctest::Approx(100.0));
    CHECK(bs.y == doctest::Approx(100.0));

    synth::Rng rng(404);
    for (int rep = 0; rep < 30; ++rep) {
        const Constellation c = synth::generate(25, 512, 512, 10, rng.next());
        for (const Vicinity& v : extract_vicinities(c, 75.0)) {
            const Minutia got = barycenter(v);
            Vec2 mean{};
            for (const Minutia& m : v.members) mean += from_local_frame(v.center, m).pos();
            mean = (1.0 / static_cast<double>(v.members.size())) * mean;
            CHECK(std::abs(got.x - mean.x) < 1e-9);
            CHECK(std::abs(got.y - mean.y) < 1e-9);
            CHECK(got.theta == doctest::Approx(v.center.theta));
        }
    }
}

TEST_CASE("one significant vicinity gives one singleton order-2 vicinity") {
    const Constellation c =
        make_constellation("c", {{0, 0, 0}, {20, 0, 1}, {0, 25, 2}, {500, 500, 0}});
    SecondOrderParams p;
    p.rho1 = 75.0;
    p.rho2 = 150.0;
    p.l_min = 2;
    p.l_max = 8;
    const auto v2 = extract_second_order(c, p);
    REQUIRE(v2.size() == 1);
    CHECK(v2[0].order == 2);
    CHECK(v2[0].members.size() == 1);
    CHECK(v2[0].rho == 150.0);
}

TEST_CASE("same clusters at different separations differ only at order 2") {
    const auto patterns = pattern_alphabet(405);
    const std::vector<std::size_t> which{0, 1, 2, 3};
    const Constellation a =
        place_clusters("a", patterns, which, {{0, 0}, {240, 0}, {0, 240}, {240, 240}});
    const Constellation b =
        place_clusters("b", patterns, which, {{0, 0}, {400, 0}, {0, 400}, {400, 400}});
    SecondOrderParams p;
    p.rho1 = 75.0;
    p.rho2 = 300.0;
    p.l_min = 2;
    p.l_max = 8;

    // Order-1 vicinities agree member-for-member (same source order).
    const auto va = extract_vicinities(a, p.rho1);
    const auto vb = extract_vicinities(b, p.rho1);
    REQUIRE(va.size() == vb.size());
    for (std::size_t i = 0; i < va.size(); ++i) {
        REQUIRE(va[i].members.size() == vb[i].members.size());
        for (std::size_t m = 0; m < va[i].members.size(); ++m) {
            CHECK(va[i].members[m].x == doctest::Approx(vb[i].members[m].x).epsilon(1e-9));
            CHECK(va[i].members[m].y == doctest::Approx(vb[i].members[m].y).epsilon(1e-9));
        }
    }

    const auto s2a = extract_second_order(a, p);
    const auto s2b = extract_second_order(b, p);
    REQUIRE(s2a.size() == 4);
    REQUIRE(s2b.size() == 4);
    CHECK(s2a[0].members.size() == 3);  // square side within rho2, diagonal outside
    CHECK(s2b[0].members.size() == 1);  // everything beyond rho2
}

TEST_CASE("order-2 extraction is rigid-invariant") {
    synth::Rng rng(406);
    SecondOrderParams p;
    for (int rep = 0; rep < 10; ++rep) {
        const Constellation c = synth::generate(35, 512, 512, 10, rng.next());
        const RigidTransform t{rng.uniform(-128.0, 128.0), rng.uniform(-128.0, 128.0),
                               rng.uniform(0.0, kTwoPi)};
        const auto v0 = extract_second_order(c, p);
        const auto v1 = extract_second_order(apply_rigid(c, t), p);
        REQUIRE(v0.size() == v1.size());
        for (std::size_t i = 0; i < v0.size(); ++i) {
            REQUIRE(v0[i].members.size() == v1[i].members.size());
            for (std::size_t m = 0; m < v0[i].members.size(); ++m) {
                CHECK(std::abs(v0[i].members[m].x - v1[i].members[m].x) < 1e-6);
                CHECK(std::abs(v0[i].members[m].y - v1[i].members[m].y) < 1e-6);
            }
        }
    }
}

TEST_CASE("two-pass decision separates rearranged layouts") {
    const auto patterns = pattern_alphabet(407);
    SecondOrderParams p;
    p.rho1 = 75.0;
    p.rho2 = 300.0;
    p.l_min = 2;
    p.l_max = 8;
    p.t1 = 4;
    p.t2 = 0;

    // DB pools: random constellations for order 1, cluster layouts for order 2.
    synth::Rng rng(408);
    std::vector<Constellation> pool1;
    for (int i = 0; i < 20; ++i) pool1.push_back(synth::generate(30, 512, 512, 10, rng.next()));
    const ScoreParams sp1 = default_score_params(p.rho1);
    const RepresentativeDB db1 =
        build_representative_db(pool1, p.rho1, 3, 8, 1.5 * sp1.k_na, 24, sp1, rng.next());

    const ScoreParams sp2 = default_score_params(p.rho2);
    std::vector<Vicinity> candidates;
    for (int i = 0; i < 14; ++i) {
        std::vector<std::size_t> which;
        std::vector<Vec2> layout;
        for (int k = 0; k < 4; ++k) {
            which.push_back(rng.index(patterns.size()));
            for (int attempt = 0;; ++attempt) {
                REQUIRE(attempt < 1000);
                const Vec2 cand{rng.uniform(0.0, 700.0), rng.uniform(0.0, 700.0)};
                bool ok = true;
                for (Vec2 q : layout) ok = ok && dist(cand, q) > 170.0;
                if (ok) {
                    layout.push_back(cand);
                    break;
                }
            }
        }
        const Constellation c =
            place_clusters("pool" + std::to_string(i), patterns, which, layout);
        for (Vicinity& v : extract_second_order(c, p)) candidates.push_back(std::move(v));
    }
    const RepresentativeDB db2 = build_representative_db(
        std::move(candidates), 2, p.rho2, 1, 8, 1.5 * sp2.k_na, 6, sp2, rng.next());

    const double ts1 = 0.5 * sp1.k_na, ts2 = 0.5 * sp2.k_na;
    const std::vector<std::size_t> which{0, 1, 2, 3};
    const Constellation a =
        place_clusters("a", patterns, which, {{0, 0}, {240, 0}, {0, 240}, {240, 240}});
    const Constellation b =
        place_clusters("b", patterns, which, {{0, 0}, {400, 0}, {0, 400}, {400, 400}});

    const TwoPassResult self = match_two_pass(a, a, db1, db2, p, ts1, ts2);
    CHECK(self.match);
    CHECK(self.hamming1 == 0);
    CHECK(self.hamming2 == 0);

    const TwoPassResult cross = match_two_pass(a, b, db1, db2, p, ts1, ts2);
    CHECK(cross.hamming1 == 0);
    CHECK(cross.hamming2 > p.t2);
    CHECK_FALSE(cross.match);

    // Never more permissive than the first pass alone.
    for (int rep = 0; rep < 5; ++rep) {
        const Constellation x = synth::generate(30, 512, 512, 10, rng.next());
        const Constellation y = synth::generate(30, 512, 512, 10, rng.next());
        const TwoPassResult r = match_two_pass(x, y, db1, db2, p, ts1, ts2);
        const bool looser = r.match && r.hamming1 > p.t1;
        CHECK_FALSE(looser);
    }
}

TEST_CASE("two-pass validates db radii against the params") {
    SecondOrderParams p;
    RepresentativeDB db1, db2;
    db1.order = 1;
    db1.rho = p.rho1 + 1.0;  // wrong on purpose
    db2.order = 2;
    db2.rho = p.rho2;
    const Constellation c = make_constellation("c", {{0, 0, 0}});
    CHECK_THROWS_AS(match_two_pass(c, c, db1, db2, p, 100.0, 100.0), std::invalid_argument);
}

}  // TEST_SUITE
