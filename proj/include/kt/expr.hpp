#pragma once

#include "kt/errors.hpp"
#include "kt/multipoly.hpp"
#include "kt/rational.hpp"

#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kt::expr {

enum class Kind { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sqrt, Sin, Cos, Exp, Log };

struct Node;

/// Immutable expression tree over variables x1..xm. Copies share structure.
class Expr {
public:
    Expr();
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    const Node& node() const { return *node_; }
    Kind kind() const;
    bool is_const() const { return kind() == Kind::Const; }
    /// True iff this is a constant equal to v.
    bool is_value(double v) const;

private:
    std::shared_ptr<const Node> node_;
};

struct Node {
    Kind kind = Kind::Const;
    double value = 0.0;               // Const
    std::optional<Rational> exact;    // Const (when exact) and Pow exponent
    int var = 0;                      // Var, 0-based
    std::vector<Expr> args;
};

// The builders fold constant subtrees only when the result stays exact;
// sqrt(2) or sin(1/2) are kept as written.
Expr constant(double v);
Expr constant(const Rational& q);
Expr variable(int index);

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Rational& exponent);
Expr sqrt(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);

/// Symbolic partial derivative with light simplification.
Expr diff(const Expr& e, int var);

/// Replaces x_i by replacements[i].
Expr substitute(const Expr& e, std::span<const Expr> replacements);

/// Text that parses back to the same tree.
std::string to_string(const Expr& e);

/// Largest variable index used plus one (0 for constants).
int variable_count(const Expr& e);

/// Raised by the parser; `position` is a 0-based offset into the input.
class ParseError : public InputError {
public:
    enum class Reason { Syntax, UnknownIdentifier, NonDifferentiable };
    ParseError(Reason reason, size_t position, std::string message, std::string expected = {});

    Reason reason() const { return reason_; }
    size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }

private:
    Reason reason_;
    size_t position_;
    std::string expected_;
};

/// Grammar: + - * / with the usual precedence, right-associative ^ whose
/// exponent must be a rational constant, unary minus, parentheses, and the
/// functions sqrt sin cos exp log. Identifiers are x1..x<max_vars> and pi.
/// Implicit multiplication is rejected.
Expr parse(std::string_view text, int max_vars = 2);

/// Converts a polynomial expression (non-negative integer powers, division by
/// constants only) to exact form.
MultiPoly to_polynomial(const Expr& e, int dimension);
MultiPoly parse_polynomial(std::string_view text, int dimension);

namespace detail {

template <class T>
T from_rational(const Rational& q) {
    return T(q.get_num().get_d()) / T(q.get_den().get_d());
}

template <class T>
T int_pow(T base, long n) {
    const bool invert = n < 0;
    unsigned long e = static_cast<unsigned long>(invert ? -n : n);
    T result(1);
    while (e) {
        if (e & 1UL)
            result *= base;
        base *= base;
        e >>= 1;
    }
    return invert ? T(1) / result : result;
}

} // namespace detail

/// Evaluates at x (any floating scalar with the usual math functions found
/// by ADL or in std).
template <class T>
T eval(const Expr& e, std::span<const T> x) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    const Node& n = e.node();
    switch (n.kind) {
    case Kind::Const:
        return n.exact ? detail::from_rational<T>(*n.exact) : T(n.value);
    case Kind::Var:
        return x[static_cast<size_t>(n.var)];
    case Kind::Add:
        return eval<T>(n.args[0], x) + eval<T>(n.args[1], x);
    case Kind::Sub:
        return eval<T>(n.args[0], x) - eval<T>(n.args[1], x);
    case Kind::Mul:
        return eval<T>(n.args[0], x) * eval<T>(n.args[1], x);
    case Kind::Div:
        return eval<T>(n.args[0], x) / eval<T>(n.args[1], x);
    case Kind::Neg:
        return -eval<T>(n.args[0], x);
    case Kind::Pow: {
        const T base = eval<T>(n.args[0], x);
        const Rational& q = *n.exact;
        if (q.get_den() == 1 && q.get_num().fits_slong_p())
            return detail::int_pow(base, q.get_num().get_si());
        return pow(base, detail::from_rational<T>(q));
    }
    case Kind::Sqrt:
        return sqrt(eval<T>(n.args[0], x));
    case Kind::Sin:
        return sin(eval<T>(n.args[0], x));
    case Kind::Cos:
        return cos(eval<T>(n.args[0], x));
    case Kind::Exp:
        return exp(eval<T>(n.args[0], x));
    case Kind::Log:
        return log(eval<T>(n.args[0], x));
    }
    return T(0);
}

inline double eval(const Expr& e, double x1, double x2) {
    const double x[2] = {x1, x2};
    return eval<double>(e, std::span<const double>(x, 2));
}

} // namespace kt::expr
