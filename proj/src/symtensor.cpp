#include "kt/symtensor.hpp"

#include "kt/errors.hpp"
#include "kt/exact_linalg.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace kt {

FlatMetric::FlatMetric(std::vector<int> signature) : signature_(std::move(signature)) {
    if (signature_.empty())
        throw InputError("metric dimension must be positive");
    for (int s : signature_)
        if (s != 1 && s != -1)
            throw InputError("metric signature entries must be +1 or -1");
}

FlatMetric FlatMetric::euclidean(int dimension) {
    if (dimension < 1)
        throw InputError("metric dimension must be positive");
    return FlatMetric(std::vector<int>(static_cast<size_t>(dimension), 1));
}

SymPolyTensor::SymPolyTensor(int dimension, int valence) : dim_(dimension), valence_(valence) {
    if (dimension < 1)
        throw InputError("tensor dimension must be positive");
    if (valence < 0)
        throw InputError("tensor valence must be non-negative");
}

SymPolyTensor SymPolyTensor::from_metric(const FlatMetric& g) {
    SymPolyTensor t(g.dimension(), 2);
    for (int i = 0; i < g.dimension(); ++i)
        t.set_component({i, i}, MultiPoly::constant(g.dimension(), g(i, i)));
    return t;
}

MultiPoly SymPolyTensor::component(IndexTuple indices) const {
    if (static_cast<int>(indices.size()) != valence_)
        throw InputError("index tuple length does not match valence");
    std::sort(indices.begin(), indices.end());
    auto it = components_.find(indices);
    return it == components_.end() ? MultiPoly(dim_) : it->second;
}

void SymPolyTensor::set_component(IndexTuple indices, MultiPoly value) {
    if (static_cast<int>(indices.size()) != valence_)
        throw InputError("index tuple length does not match valence");
    if (value.dimension() != dim_)
        throw InputError("component dimension does not match tensor dimension");
    for (int i : indices)
        if (i < 0 || i >= dim_)
            throw InputError("tensor index out of range");
    std::sort(indices.begin(), indices.end());
    if (value.is_zero())
        components_.erase(indices);
    else
        components_[indices] = std::move(value);
}

void SymPolyTensor::add_to_component(IndexTuple indices, const MultiPoly& value) {
    std::sort(indices.begin(), indices.end());
    set_component(indices, component(indices) + value);
}

int SymPolyTensor::degree() const {
    int d = -1;
    for (const auto& [idx, poly] : components_)
        d = std::max(d, poly.degree());
    return d;
}

SymPolyTensor& SymPolyTensor::operator+=(const SymPolyTensor& other) {
    if (other.dim_ != dim_ || other.valence_ != valence_)
        throw InputError("tensor shape mismatch in addition");
    for (const auto& [idx, poly] : other.components_)
        add_to_component(idx, poly);
    return *this;
}

SymPolyTensor& SymPolyTensor::operator*=(const Rational& c) {
    if (c == 0) {
        components_.clear();
        return *this;
    }
    for (auto& [idx, poly] : components_)
        poly *= c;
    return *this;
}

std::vector<IndexTuple> canonical_index_tuples(int dimension, int valence) {
    std::vector<IndexTuple> out;
    IndexTuple t(static_cast<size_t>(valence), 0);
    auto fill = [&](auto&& self, size_t pos, int lo) -> void {
        if (pos == t.size()) {
            out.push_back(t);
            return;
        }
        for (int v = lo; v < dimension; ++v) {
            t[pos] = v;
            self(self, pos + 1, v);
        }
    };
    fill(fill, 0, 0);
    return out;
}

namespace {

using Derivatives = std::vector<std::map<IndexTuple, MultiPoly>>;

Derivatives gradients(const SymPolyTensor& t) {
    Derivatives d(static_cast<size_t>(t.dimension()));
    for (const auto& [idx, poly] : t.components())
        for (int k = 0; k < t.dimension(); ++k) {
            MultiPoly dp = poly.derivative(k);
            if (!dp.is_zero())
                d[static_cast<size_t>(k)].emplace(idx, std::move(dp));
        }
    return d;
}

const MultiPoly* lookup(const std::map<IndexTuple, MultiPoly>& m, IndexTuple idx) {
    std::sort(idx.begin(), idx.end());
    auto it = m.find(idx);
    return it == m.end() ? nullptr : &it->second;
}

// Enumerates position subsets of size `count` out of `n` as bit masks.
std::vector<std::vector<bool>> position_subsets(int n, int count) {
    std::vector<std::vector<bool>> out;
    std::vector<bool> mask(static_cast<size_t>(n), false);
    std::fill(mask.begin(), mask.begin() + count, true);
    std::sort(mask.begin(), mask.end());
    do {
        out.push_back(mask);
    } while (std::next_permutation(mask.begin(), mask.end()));
    return out;
}

// Sum over position subsets S (|S| = p-1) and k of X^{k I[S]} d_k Y^{I[S^c]},
// divided by the number of subsets.
MultiPoly symmetrized_term(const SymPolyTensor& x, const Derivatives& dy, const IndexTuple& out,
                           const std::vector<std::vector<bool>>& subsets) {
    const int m = x.dimension();
    MultiPoly sum(m);
    for (const auto& mask : subsets) {
        IndexTuple xi{0}, yi;
        for (size_t pos = 0; pos < out.size(); ++pos)
            (mask[pos] ? xi : yi).push_back(out[pos]);
        for (int k = 0; k < m; ++k) {
            const MultiPoly* dyk = lookup(dy[static_cast<size_t>(k)], yi);
            if (!dyk)
                continue;
            xi[0] = k;
            const MultiPoly* xk = lookup(x.components(), xi);
            if (!xk)
                continue;
            sum += (*xk) * (*dyk);
        }
    }
    sum *= Rational(1, static_cast<long>(subsets.size()));
    return sum;
}

} // namespace

SymPolyTensor schouten_bracket(const SymPolyTensor& a, const SymPolyTensor& b) {
    if (a.dimension() != b.dimension())
        throw InputError("schouten_bracket: dimension mismatch (" + std::to_string(a.dimension()) +
                         " vs " + std::to_string(b.dimension()) + ")");
    const int p = a.valence();
    const int q = b.valence();
    if (p + q < 1)
        throw InputError("schouten_bracket: valences must satisfy p + q >= 1");
    const int m = a.dimension();
    const int r = p + q - 1;

    SymPolyTensor out(m, r);
    const Derivatives da = gradients(a);
    const Derivatives db = gradients(b);
    const bool first = p >= 1 && !std::all_of(db.begin(), db.end(), [](auto& d) { return d.empty(); });
    const bool second = q >= 1 && !std::all_of(da.begin(), da.end(), [](auto& d) { return d.empty(); });
    const auto subsets_a = first ? position_subsets(r, p - 1) : std::vector<std::vector<bool>>{};
    const auto subsets_b = second ? position_subsets(r, q - 1) : std::vector<std::vector<bool>>{};

    for (const auto& idx : canonical_index_tuples(m, r)) {
        MultiPoly value(m);
        if (first)
            value += Rational(p) * symmetrized_term(a, db, idx, subsets_a);
        if (second)
            value -= Rational(q) * symmetrized_term(b, da, idx, subsets_b);
        if (!value.is_zero())
            out.set_component(idx, std::move(value));
    }
    return out;
}

SymPolyTensor gkt_operator(const SymPolyTensor& k, const FlatMetric& g, int n) {
    if (k.dimension() != g.dimension())
        throw InputError("gkt_operator: tensor dimension " + std::to_string(k.dimension()) +
                         " does not match metric dimension " + std::to_string(g.dimension()));
    if (n < 0)
        throw InputError("gkt_operator: order n must be non-negative");
    const SymPolyTensor gt = SymPolyTensor::from_metric(g);
    SymPolyTensor t = k;
    for (int i = 0; i <= n; ++i)
        t = schouten_bracket(t, gt);
    return t;
}

GktSolution solve_gkt(int m, int n, int p, const FlatMetric& g, std::optional<int> degree_bound,
                      const GktLimits& limits) {
    if (m < 1 || n < 0 || p < 0)
        throw InputError("solve_gkt: require m >= 1, n >= 0, p >= 0");
    if (g.dimension() != m)
        throw InputError("solve_gkt: metric dimension does not match m");
    if (m > limits.max_dimension || p > limits.max_valence || n > limits.max_order)
        throw InputError("solve_gkt: (m, n, p) exceeds the size guard (m <= " +
                         std::to_string(limits.max_dimension) + ", n <= " +
                         std::to_string(limits.max_order) + ", p <= " +
                         std::to_string(limits.max_valence) + ")");
    const int degree = degree_bound.value_or(p + n);
    if (degree < 0)
        throw InputError("solve_gkt: degree bound must be non-negative");

    const auto comps = canonical_index_tuples(m, p);
    const auto monos = monomials_up_to(m, degree);
    const int unknowns = static_cast<int>(comps.size() * monos.size());

    std::map<std::pair<IndexTuple, Monomial>, int> row_index;
    std::vector<SparseRow> rows;
    int u = 0;
    for (const auto& c : comps) {
        for (const auto& mono : monos) {
            SymPolyTensor trial(m, p);
            trial.set_component(c, MultiPoly::monomial(mono));
            const SymPolyTensor image = gkt_operator(trial, g, n);
            for (const auto& [idx, poly] : image.components())
                for (const auto& [e, coeff] : poly.terms()) {
                    auto [it, inserted] =
                        row_index.try_emplace({idx, e}, static_cast<int>(rows.size()));
                    if (inserted)
                        rows.emplace_back();
                    rows[static_cast<size_t>(it->second)].emplace_back(u, coeff);
                }
            ++u;
        }
    }

    RowEchelon echelon(std::move(rows), unknowns);
    GktSolution sol;
    sol.degree_bound = degree;
    for (auto& vec : echelon.nullspace()) {
        auto first = std::find_if(vec.begin(), vec.end(), [](const Rational& v) { return v != 0; });
        const Rational lead = *first;
        SymPolyTensor t(m, p);
        size_t k = 0;
        for (const auto& c : comps) {
            MultiPoly poly(m);
            for (const auto& mono : monos) {
                if (vec[k] != 0)
                    poly.add_term(mono, vec[k] / lead);
                ++k;
            }
            t.set_component(c, std::move(poly));
        }
        sol.basis.push_back(std::move(t));
    }
    sol.dimension = static_cast<int>(sol.basis.size());
    return sol;
}

std::uint64_t npe_dimension(int m, int n, int p) {
    if (m < 1 || n < 0 || p < 0)
        throw InputError("npe_dimension: require m >= 1, n >= 0, p >= 0");
    Integer c1, c2;
    mpz_bin_uiui(c1.get_mpz_t(), static_cast<unsigned long>(p + m - 1), static_cast<unsigned long>(m - 1));
    mpz_bin_uiui(c2.get_mpz_t(), static_cast<unsigned long>(p + n + m), static_cast<unsigned long>(m - 1));
    Integer numerator = Integer(n + 1) * c1 * c2;
    if (numerator % m != 0)
        throw NumericError("npe_dimension: product is not divisible by m");
    Integer d = numerator / m;
    if (!d.fits_ulong_p())
        throw NumericError("npe_dimension: result does not fit in 64 bits");
    return d.get_ui();
}

} // namespace kt
