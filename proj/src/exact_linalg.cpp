#include "kt/exact_linalg.hpp"

#include "kt/errors.hpp"

#include <map>

namespace kt {
namespace {

// row <- row - factor * pivot, both sorted sparse rows.
SparseRow axpy(const SparseRow& row, const Rational& factor, const SparseRow& pivot) {
    SparseRow out;
    out.reserve(row.size() + pivot.size());
    size_t i = 0, j = 0;
    while (i < row.size() || j < pivot.size()) {
        if (j == pivot.size() || (i < row.size() && row[i].first < pivot[j].first)) {
            out.push_back(row[i++]);
        } else if (i == row.size() || pivot[j].first < row[i].first) {
            out.emplace_back(pivot[j].first, -factor * pivot[j].second);
            ++j;
        } else {
            Rational v = row[i].second - factor * pivot[j].second;
            if (v != 0)
                out.emplace_back(row[i].first, std::move(v));
            ++i;
            ++j;
        }
    }
    return out;
}

} // namespace

RowEchelon::RowEchelon(std::vector<SparseRow> rows, int columns) : columns_(columns) {
    // Rows bucketed by leading column; each bucket keeps insertion order.
    std::map<int, std::vector<SparseRow>> buckets;
    for (auto& r : rows) {
        if (r.empty())
            continue;
        if (r.back().first >= columns || r.front().first < 0)
            throw InputError("sparse row column out of range");
        int lead = r.front().first;
        buckets[lead].push_back(std::move(r));
    }

    while (!buckets.empty()) {
        auto node = buckets.extract(buckets.begin());
        const int col = node.key();
        auto& candidates = node.mapped();

        size_t best = 0;
        Integer best_height = height(candidates[0].front().second);
        for (size_t k = 1; k < candidates.size(); ++k) {
            Integer h = height(candidates[k].front().second);
            if (h < best_height) {
                best_height = h;
                best = k;
            }
        }
        SparseRow pivot = std::move(candidates[best]);
        const Rational inv = 1 / pivot.front().second;
        for (auto& [c, v] : pivot)
            v *= inv;

        for (size_t k = 0; k < candidates.size(); ++k) {
            if (k == best)
                continue;
            const Rational factor = candidates[k].front().second;
            SparseRow reduced = axpy(candidates[k], factor, pivot);
            if (!reduced.empty()) {
                int lead = reduced.front().first;
                buckets[lead].push_back(std::move(reduced));
            }
        }
        pivot_rows_.push_back(std::move(pivot));
        pivot_cols_.push_back(col);
    }
}

std::vector<int> RowEchelon::free_columns() const {
    std::vector<int> out;
    size_t p = 0;
    for (int c = 0; c < columns_; ++c) {
        if (p < pivot_cols_.size() && pivot_cols_[p] == c) {
            ++p;
            continue;
        }
        out.push_back(c);
    }
    return out;
}

std::vector<std::vector<Rational>> RowEchelon::nullspace() const {
    std::vector<std::vector<Rational>> basis;
    for (int f : free_columns()) {
        std::vector<Rational> x(static_cast<size_t>(columns_), Rational(0));
        x[static_cast<size_t>(f)] = 1;
        // Back substitution: pivot rows are in increasing pivot-column order.
        for (size_t r = pivot_rows_.size(); r-- > 0;) {
            const auto& row = pivot_rows_[r];
            Rational sum = 0;
            for (size_t k = 1; k < row.size(); ++k) {
                const auto& xv = x[static_cast<size_t>(row[k].first)];
                if (xv != 0)
                    sum += row[k].second * xv;
            }
            x[static_cast<size_t>(pivot_cols_[r])] = -sum;
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

int exact_rank(const std::vector<std::vector<Rational>>& rows) {
    int columns = 0;
    std::vector<SparseRow> sparse;
    for (const auto& r : rows) {
        columns = std::max(columns, static_cast<int>(r.size()));
        SparseRow s;
        for (size_t c = 0; c < r.size(); ++c)
            if (r[c] != 0)
                s.emplace_back(static_cast<int>(c), r[c]);
        sparse.push_back(std::move(s));
    }
    return RowEchelon(std::move(sparse), columns).rank();
}

} // namespace kt
