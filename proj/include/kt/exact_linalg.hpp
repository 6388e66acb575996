#pragma once

#include "kt/rational.hpp"

#include <utility>
#include <vector>

namespace kt {

/// Sparse row: (column, value) pairs with strictly increasing columns and
/// nonzero values.
using SparseRow = std::vector<std::pair<int, Rational>>;

/// Row echelon form of a sparse rational matrix, computed by exact
/// Gaussian elimination. Pivots are chosen column by column among the rows
/// leading in that column, minimizing |num*den| of the pivot entry (ties go
/// to the earlier row), which keeps the result independent of scheduling.
class RowEchelon {
public:
    RowEchelon(std::vector<SparseRow> rows, int columns);

    int columns() const { return columns_; }
    int rank() const { return static_cast<int>(pivot_rows_.size()); }
    const std::vector<int>& pivot_columns() const { return pivot_cols_; }
    std::vector<int> free_columns() const;

    /// Nullspace basis, one vector per free column (dense, length `columns`).
    std::vector<std::vector<Rational>> nullspace() const;

private:
    int columns_;
    std::vector<SparseRow> pivot_rows_; // leading entry 1, ordered by pivot column
    std::vector<int> pivot_cols_;
};

/// Rank of a dense rational matrix given by rows.
int exact_rank(const std::vector<std::vector<Rational>>& rows);

} // namespace kt
