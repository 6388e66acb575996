#pragma once

#include "kt/rational.hpp"

#include <map>
#include <string>
#include <vector>

namespace kt {

/// Exponent multi-index of a monomial x1^e1 ... xm^em.
using Monomial = std::vector<int>;

/// Sparse polynomial in m variables with exact rational coefficients.
/// Zero coefficients are never stored, so an empty term map is the zero
/// polynomial.
class MultiPoly {
public:
    using Terms = std::map<Monomial, Rational>;

    explicit MultiPoly(int dimension = 1);

    static MultiPoly constant(int dimension, const Rational& c);
    static MultiPoly variable(int dimension, int index); // 0-based
    static MultiPoly monomial(const Monomial& exponents, const Rational& c = 1);

    int dimension() const { return dim_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    /// Maximum total degree; -1 for the zero polynomial.
    int degree() const;

    /// Coefficient of a monomial (zero if absent).
    Rational coefficient(const Monomial& exponents) const;
    void add_term(const Monomial& exponents, const Rational& c);

    MultiPoly derivative(int index) const;
    double evaluate(const std::vector<double>& x) const;
    Rational evaluate(const std::vector<Rational>& x) const;

    MultiPoly& operator+=(const MultiPoly& other);
    MultiPoly& operator-=(const MultiPoly& other);
    MultiPoly& operator*=(const Rational& c);

    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator*(MultiPoly a, const Rational& c) { return a *= c; }
    friend MultiPoly operator*(const Rational& c, MultiPoly a) { return a *= c; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend bool operator==(const MultiPoly& a, const MultiPoly& b) {
        return a.dim_ == b.dim_ && a.terms_ == b.terms_;
    }

    /// Text in the potential grammar, e.g. "x1^2*x2 - 3/2*x1 + 1".
    /// Terms are printed by descending total degree, then lexicographically.
    std::string to_string() const;

private:
    void check_dimension(const MultiPoly& other) const;

    int dim_;
    Terms terms_;
};

/// All exponent vectors in `dimension` variables of total degree exactly `degree`,
/// in lexicographic order.
std::vector<Monomial> monomials_of_degree(int dimension, int degree);

/// All exponent vectors of total degree <= max_degree, lexicographic order.
std::vector<Monomial> monomials_up_to(int dimension, int max_degree);

} // namespace kt
