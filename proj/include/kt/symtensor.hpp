#pragma once

#include "kt/multipoly.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace kt {

/// Non-decreasing tuple of 0-based indices (i1 <= ... <= ip).
using IndexTuple = std::vector<int>;

/// Constant diagonal metric g^{ij} = diag(signature) on flat m-space.
class FlatMetric {
public:
    explicit FlatMetric(std::vector<int> signature);
    static FlatMetric euclidean(int dimension);

    int dimension() const { return static_cast<int>(signature_.size()); }
    const std::vector<int>& signature() const { return signature_; }
    int operator()(int i, int j) const { return i == j ? signature_[static_cast<size_t>(i)] : 0; }

private:
    std::vector<int> signature_;
};

/// Symmetric contravariant tensor of valence p on flat m-space whose
/// components are polynomials. Only canonical (sorted) index tuples are
/// stored; zero components are omitted.
class SymPolyTensor {
public:
    SymPolyTensor(int dimension, int valence);

    static SymPolyTensor from_metric(const FlatMetric& g);

    int dimension() const { return dim_; }
    int valence() const { return valence_; }

    /// Lookup for any index order; permutations share one entry.
    MultiPoly component(IndexTuple indices) const;
    void set_component(IndexTuple indices, MultiPoly value);
    void add_to_component(IndexTuple indices, const MultiPoly& value);

    const std::map<IndexTuple, MultiPoly>& components() const { return components_; }
    bool is_zero() const { return components_.empty(); }
    int degree() const;

    SymPolyTensor& operator+=(const SymPolyTensor& other);
    SymPolyTensor& operator*=(const Rational& c);
    friend SymPolyTensor operator+(SymPolyTensor a, const SymPolyTensor& b) { return a += b; }
    friend SymPolyTensor operator*(const Rational& c, SymPolyTensor a) { return a *= c; }
    friend bool operator==(const SymPolyTensor& a, const SymPolyTensor& b) {
        return a.dim_ == b.dim_ && a.valence_ == b.valence_ && a.components_ == b.components_;
    }

private:
    int dim_;
    int valence_;
    std::map<IndexTuple, MultiPoly> components_;
};

/// Every non-decreasing index tuple of the given length over 0..dimension-1.
std::vector<IndexTuple> canonical_index_tuples(int dimension, int valence);

/// Schouten bracket of symmetric contravariant tensors in flat coordinates:
///
///   [A,B]^{I} = p Sym(A^{k i1..i(p-1)} d_k B^{...}) - q Sym(B^{k i1..i(q-1)} d_k A^{...})
///
/// where Sym averages over the free index positions. With this normalization
/// [A,B] = -[B,A] for equal valences, and [K,g] for constant g is -2 times the
/// symmetrized gradient of K. Throws InputError on dimension mismatch or
/// p + q = 0.
SymPolyTensor schouten_bracket(const SymPolyTensor& a, const SymPolyTensor& b);

/// n+1 nested brackets [[...[K,g],g]...,g].
SymPolyTensor gkt_operator(const SymPolyTensor& k, const FlatMetric& g, int n);

struct GktSolution {
    std::vector<SymPolyTensor> basis;
    int dimension = 0;
    int degree_bound = 0;
};

struct GktLimits {
    int max_dimension = 4;
    int max_valence = 4;
    int max_order = 3;
};

/// Solves gkt_operator(K) = 0 over a polynomial ansatz of all components up to
/// `degree_bound` (default p + n). The basis is a rational nullspace basis
/// ordered by free unknown, each vector scaled so its first nonzero
/// coefficient in (component, monomial) lexicographic order is 1.
GktSolution solve_gkt(int m, int n, int p, const FlatMetric& g,
                      std::optional<int> degree_bound = std::nullopt,
                      const GktLimits& limits = {});

/// Generalized Killing tensor dimension on a constant-curvature space,
/// ((n+1)/m) C(p+m-1, m-1) C(p+n+m, m-1).
std::uint64_t npe_dimension(int m, int n, int p);

} // namespace kt
