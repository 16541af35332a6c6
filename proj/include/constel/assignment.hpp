// Minimum-cost assignment over minutia score matrices, with virtual-column
// padding for unequal vicinity sizes.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace constel {

/// Dense non-negative score matrix. Virtual columns are max-valued padding
/// appended by pad_to_square; their assignments mark unassociated rows.
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;      ///< row-major, rows * cols entries
    std::size_t virtual_cols = 0;    ///< padding columns appended on the right
    bool transposed = false;         ///< rows/cols swapped relative to the caller's orientation

    double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

CostMatrix make_cost_matrix(std::size_t rows, std::size_t cols);

/// A partial bijection between rows and columns in the caller's original
/// orientation. Pairs assigned to virtual columns are stripped; their rows
/// appear in unassigned_rows.
struct Assignment {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  ///< (row, col), sorted by row
    double total_cost = 0.0;         ///< sum of matrix entries at pairs
    std::vector<std::size_t> unassigned_rows;
    std::vector<std::size_t> unassigned_cols;
};

/// Appends max-valued virtual columns until the matrix is square. Inputs with
/// cols > rows are transposed first (recorded in the transposed flag).
/// Throws std::invalid_argument on an empty matrix.
CostMatrix pad_to_square(CostMatrix m);

/// Exact O(n^3) Hungarian minimum over all perfect matchings of a padded
/// square matrix. Deterministic: ties resolve to the lowest row, then the
/// lowest column index. Throws on non-square or non-finite input.
Assignment solve(const CostMatrix& m);

}  // namespace constel
