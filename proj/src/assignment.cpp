#include "constel/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace constel {

CostMatrix make_cost_matrix(std::size_t rows, std::size_t cols) {
    CostMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.values.assign(rows * cols, 0.0);
    return m;
}

CostMatrix pad_to_square(CostMatrix m) {
    if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("empty cost matrix");
    if (m.cols > m.rows) {
        CostMatrix t = make_cost_matrix(m.cols, m.rows);
        for (std::size_t r = 0; r < m.rows; ++r)
            for (std::size_t c = 0; c < m.cols; ++c)
                t.at(c, r) = m.at(r, c);
        t.transposed = !m.transposed;
        m = std::move(t);
    }
    if (m.rows == m.cols) return m;

    const double pad = *std::max_element(m.values.begin(), m.values.end());
    CostMatrix out = make_cost_matrix(m.rows, m.rows);
    out.transposed = m.transposed;
    out.virtual_cols = m.rows - m.cols;
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) out.at(r, c) = m.at(r, c);
        for (std::size_t c = m.cols; c < m.rows; ++c) out.at(r, c) = pad;
    }
    return out;
}

Assignment solve(const CostMatrix& m) {
    if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("empty cost matrix");
    if (m.rows != m.cols)
        throw std::invalid_argument("cost matrix is not square; pad_to_square it first");
    for (double v : m.values)
        if (!std::isfinite(v)) throw std::invalid_argument("non-finite cost matrix entry");

    // Kuhn with row/column potentials, O(n^3). 1-based internals; column 0 is
    // the sentinel. Rows enter in ascending order and column scans use strict
    // comparisons, so ties resolve to the lowest row, then the lowest column.
    const std::size_t n = m.rows;
    const double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            std::size_t j1 = 0;
            double delta = kInf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = m.at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    // row_to_col in the padded orientation
    std::vector<std::size_t> row_to_col(n, 0);
    for (std::size_t j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;

    const std::size_t real_cols = n - m.virtual_cols;
    Assignment out;
    std::vector<char> col_hit(real_cols, 0), row_hit(n, 0);
    for (std::size_t r = 0; r < n; ++r) {
        const std::size_t c = row_to_col[r];
        if (c >= real_cols) continue;  // virtual column: association discarded
        if (m.transposed)
            out.pairs.emplace_back(c, r);
        else
            out.pairs.emplace_back(r, c);
        row_hit[r] = 1;
        col_hit[c] = 1;
    }
    std::sort(out.pairs.begin(), out.pairs.end());
    for (std::size_t r = 0; r < n; ++r)
        if (!row_hit[r]) (m.transposed ? out.unassigned_cols : out.unassigned_rows).push_back(r);
    for (std::size_t c = 0; c < real_cols; ++c)
        if (!col_hit[c]) (m.transposed ? out.unassigned_rows : out.unassigned_cols).push_back(c);

    for (const auto& [r, c] : out.pairs)
        out.total_cost += m.transposed ? m.at(c, r) : m.at(r, c);
    return out;
}

}  // namespace constel
