#include <doctest.h>

#include <limits>
#include <stdexcept>

#include "constel/assignment.hpp"
#include "constel/synth.hpp"
#include "oracles.hpp"

using namespace constel;

namespace {

CostMatrix random_matrix(std::size_t rows, std::size_t cols, synth::Rng& rng, double lo = 0.0,
                         double hi = 100.0) {
    CostMatrix m = make_cost_matrix(rows, cols);
    for (double& v : m.values) v = rng.uniform(lo, hi);
    return m;
}

}  // namespace

TEST_SUITE("assignment") {

TEST_CASE("pad keeps square matrices untouched") {
    CostMatrix m = make_cost_matrix(2, 2);
    m.values = {1, 2, 3, 4};
    const CostMatrix p = pad_to_square(m);
    CHECK(p.rows == 2);
    CHECK(p.cols == 2);
    CHECK(p.virtual_cols == 0);
    CHECK_FALSE(p.transposed);
    CHECK(p.values == m.values);
}

TEST_CASE("pad appends a max-valued virtual column") {
    CostMatrix m = make_cost_matrix(3, 2);
    m.values = {1, 2, 3, 4, 5, 6};
    const CostMatrix p = pad_to_square(m);
    REQUIRE(p.rows == 3);
    REQUIRE(p.cols == 3);
    CHECK(p.virtual_cols == 1);
    for (std::size_t r = 0; r < 3; ++r) CHECK(p.at(r, 2) == 6.0);
    CHECK(p.at(0, 0) == 1.0);
    CHECK(p.at(2, 1) == 6.0);
}

TEST_CASE("pad transposes wide matrices first") {
    CostMatrix m = make_cost_matrix(2, 3);
    m.values = {1, 2, 3, 4, 5, 6};
    const CostMatrix p = pad_to_square(m);
    CHECK(p.transposed);
    CHECK(p.rows == 3);
    CHECK(p.virtual_cols == 1);
    CHECK(p.at(0, 0) == 1.0);
    CHECK(p.at(2, 1) == 6.0);  // caller's (1,2)
    CHECK(p.at(1, 2) == 6.0);  // virtual
}

TEST_CASE("pad rejects empty matrices") {
    CHECK_THROWS_WITH_AS(pad_to_square(make_cost_matrix(1, 0)), "empty cost matrix",
                         std::invalid_argument);
    CHECK_THROWS_AS(pad_to_square(make_cost_matrix(0, 0)), std::invalid_argument);
}

TEST_CASE("solve zero-diagonal example") {
    CostMatrix m = make_cost_matrix(2, 2);
    m.values = {0, 9, 9, 0};
    const Assignment a = solve(pad_to_square(m));
    REQUIRE(a.pairs.size() == 2);
    CHECK(a.pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(a.pairs[1] == std::pair<std::size_t, std::size_t>{1, 1});
    CHECK(a.total_cost == 0.0);
}

TEST_CASE("solve anti-diagonal example") {
    CostMatrix m = make_cost_matrix(2, 2);
    m.values = {4, 1, 2, 8};
    const Assignment a = solve(pad_to_square(m));
    REQUIRE(a.pairs.size() == 2);
    CHECK(a.pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
    CHECK(a.pairs[1] == std::pair<std::size_t, std::size_t>{1, 0});
    CHECK(a.total_cost == 3.0);
}

TEST_CASE("solve validates its input") {
    CHECK_THROWS_AS(solve(make_cost_matrix(2, 3)), std::invalid_argument);
    CostMatrix m = make_cost_matrix(2, 2);
    m.values = {0, 1, std::numeric_limits<double>::infinity(), 2};
    CHECK_THROWS_AS(solve(m), std::invalid_argument);
    m.values = {0, 1, std::nan(""), 2};
    CHECK_THROWS_AS(solve(m), std::invalid_argument);
}

TEST_CASE("solve equals the permutation oracle on random square matrices") {
    synth::Rng rng(201);
    for (std::size_t n = 2; n <= 7; ++n) {
        for (int rep = 0; rep < 60; ++rep) {
            const CostMatrix m = random_matrix(n, n, rng);
            const Assignment a = solve(m);
            CHECK(a.total_cost == oracles::permutation_min_cost(m));
            CHECK(a.pairs.size() == n);
            CHECK(a.unassigned_rows.empty());
            CHECK(a.unassigned_cols.empty());
        }
    }
}

TEST_CASE("integer matrices solve exactly") {
    synth::Rng rng(202);
    for (int rep = 0; rep < 200; ++rep) {
        CostMatrix m = make_cost_matrix(5, 5);
        for (double& v : m.values) v = static_cast<double>(rng.index(50));
        const Assignment a = solve(m);
        CHECK(a.total_cost == oracles::permutation_min_cost(m));
    }
}

TEST_CASE("constant shift moves the cost by n*c and keeps the pairs optimal") {
    synth::Rng rng(203);
    for (std::size_t n = 2; n <= 5; ++n) {
        for (int rep = 0; rep < 40; ++rep) {
            const CostMatrix m = random_matrix(n, n, rng);
            const double c = rng.uniform(1.0, 25.0);
            CostMatrix shifted = m;
            for (double& v : shifted.values) v += c;
            const Assignment a = solve(m);
            const Assignment s = solve(shifted);
            CHECK(s.total_cost ==
                  doctest::Approx(a.total_cost + static_cast<double>(n) * c).epsilon(1e-12));
            double shifted_pairs_cost = 0.0;
            for (auto [r, col] : s.pairs) shifted_pairs_cost += shifted.at(r, col);
            CHECK(shifted_pairs_cost == oracles::permutation_min_cost(shifted));
        }
    }
}

TEST_CASE("virtual columns strip into unassigned rows") {
    synth::Rng rng(204);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t rows = 2 + rng.index(4);  // 2..5
        const std::size_t cols = 1 + rng.index(rows);
        const CostMatrix m = random_matrix(rows, cols, rng);
        const Assignment a = solve(pad_to_square(m));
        CHECK(a.pairs.size() == cols);
        CHECK(a.unassigned_rows.size() == rows - cols);
        CHECK(a.unassigned_cols.empty());
        std::vector<bool> row_used(rows, false), col_used(cols, false);
        double sum = 0.0;
        for (auto [r, c] : a.pairs) {
            REQUIRE(r < rows);
            REQUIRE(c < cols);
            CHECK_FALSE(row_used[r]);
            CHECK_FALSE(col_used[c]);
            row_used[r] = col_used[c] = true;
            sum += m.at(r, c);
        }
        for (std::size_t r : a.unassigned_rows) {
            CHECK_FALSE(row_used[r]);
            row_used[r] = true;
        }
        CHECK(a.total_cost == doctest::Approx(sum).epsilon(1e-12));
    }
}

TEST_CASE("transposed rectangles report unassigned columns in caller orientation") {
    synth::Rng rng(205);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t rows = 1 + rng.index(3);  // 1..3
        const std::size_t cols = rows + 1 + rng.index(3);
        const CostMatrix m = random_matrix(rows, cols, rng);
        const Assignment a = solve(pad_to_square(m));
        CHECK(a.pairs.size() == rows);
        CHECK(a.unassigned_rows.empty());
        CHECK(a.unassigned_cols.size() == cols - rows);
        for (std::size_t i = 1; i < a.pairs.size(); ++i)
            CHECK(a.pairs[i - 1].first < a.pairs[i].first);
        for (auto [r, c] : a.pairs) {
            CHECK(r < rows);
            CHECK(c < cols);
        }
    }
}

TEST_CASE("rectangular costs equal an exhaustive injection search") {
    synth::Rng rng(206);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t rows = 4, cols = 2;
        const CostMatrix m = random_matrix(rows, cols, rng);
        const Assignment a = solve(pad_to_square(m));
        // Enumerate all ordered picks of 2 distinct rows for the 2 columns.
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t r0 = 0; r0 < rows; ++r0)
            for (std::size_t r1 = 0; r1 < rows; ++r1) {
                if (r0 == r1) continue;
                best = std::min(best, m.at(r0, 0) + m.at(r1, 1));
            }
        CHECK(a.total_cost == doctest::Approx(best).epsilon(1e-12));
    }
}

}  // TEST_SUITE
