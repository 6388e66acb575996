#include "kt/expr.hpp"

#include <cstdio>
#include <functional>
#include <numbers>

namespace kt::expr {
namespace {

std::shared_ptr<const Node> make(Kind kind, std::vector<Expr> args) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->args = std::move(args);
    return n;
}

const Rational* exact_of(const Expr& e) {
    const Node& n = e.node();
    return n.kind == Kind::Const && n.exact ? &*n.exact : nullptr;
}

Expr unary(Kind kind, const Expr& a) { return Expr(make(kind, {a})); }

bool both_exact(const Expr& a, const Expr& b) { return exact_of(a) && exact_of(b); }

} // namespace

Expr::Expr() : node_(std::make_shared<Node>()) {}

Kind Expr::kind() const { return node_->kind; }

bool Expr::is_value(double v) const { return is_const() && node_->value == v; }

Expr constant(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->value = v;
    return Expr(n);
}

Expr constant(const Rational& q) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Const;
    n->exact = q;
    n->value = detail::from_rational<double>(q);
    return Expr(n);
}

Expr variable(int index) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->var = index;
    return Expr(n);
}

Expr operator+(const Expr& a, const Expr& b) {
    if (a.is_value(0.0))
        return b;
    if (b.is_value(0.0))
        return a;
    if (both_exact(a, b))
        return constant(Rational(*exact_of(a) + *exact_of(b)));
    return Expr(make(Kind::Add, {a, b}));
}

Expr operator-(const Expr& a, const Expr& b) {
    if (b.is_value(0.0))
        return a;
    if (a.is_value(0.0))
        return -b;
    if (both_exact(a, b))
        return constant(Rational(*exact_of(a) - *exact_of(b)));
    return Expr(make(Kind::Sub, {a, b}));
}

Expr operator*(const Expr& a, const Expr& b) {
    if (a.is_value(0.0) || b.is_value(0.0))
        return constant(Rational(0));
    if (a.is_value(1.0))
        return b;
    if (b.is_value(1.0))
        return a;
    if (both_exact(a, b))
        return constant(Rational(*exact_of(a) * *exact_of(b)));
    return Expr(make(Kind::Mul, {a, b}));
}

Expr operator/(const Expr& a, const Expr& b) {
    if (b.is_value(1.0))
        return a;
    if (a.is_value(0.0) && !b.is_value(0.0))
        return constant(Rational(0));
    if (both_exact(a, b) && *exact_of(b) != 0)
        return constant(Rational(*exact_of(a) / *exact_of(b)));
    return Expr(make(Kind::Div, {a, b}));
}

Expr operator-(const Expr& a) {
    if (exact_of(a))
        return constant(Rational(-*exact_of(a)));
    if (a.kind() == Kind::Neg)
        return a.node().args[0];
    return Expr(make(Kind::Neg, {a}));
}

Expr pow(const Expr& base, const Rational& exponent) {
    if (exponent == 0)
        return constant(Rational(1));
    if (exponent == 1)
        return base;
    if (exact_of(base) && exponent.get_den() == 1 && exponent.get_num().fits_slong_p() &&
        !(exponent < 0 && *exact_of(base) == 0))
        return constant(detail::int_pow(*exact_of(base), exponent.get_num().get_si()));
    if (base.kind() == Kind::Pow) {
        // (u^a)^b = u^(ab) only for integer b, where it is an identity.
        if (exponent.get_den() == 1)
            return pow(base.node().args[0], Rational(*base.node().exact * exponent));
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Pow;
    n->args = {base};
    n->exact = exponent;
    return Expr(n);
}

Expr sqrt(const Expr& a) { return unary(Kind::Sqrt, a); }
Expr sin(const Expr& a) { return unary(Kind::Sin, a); }
Expr cos(const Expr& a) { return unary(Kind::Cos, a); }
Expr exp(const Expr& a) { return unary(Kind::Exp, a); }
Expr log(const Expr& a) { return unary(Kind::Log, a); }

Expr diff(const Expr& e, int var) {
    const Node& n = e.node();
    auto d = [var](const Expr& a) { return diff(a, var); };
    switch (n.kind) {
    case Kind::Const:
        return constant(Rational(0));
    case Kind::Var:
        return constant(Rational(n.var == var ? 1 : 0));
    case Kind::Add:
        return d(n.args[0]) + d(n.args[1]);
    case Kind::Sub:
        return d(n.args[0]) - d(n.args[1]);
    case Kind::Mul:
        return d(n.args[0]) * n.args[1] + n.args[0] * d(n.args[1]);
    case Kind::Div: {
        const Expr& u = n.args[0];
        const Expr& v = n.args[1];
        if (v.is_const())
            return d(u) / v;
        return (d(u) * v - u * d(v)) / pow(v, 2);
    }
    case Kind::Neg:
        return -d(n.args[0]);
    case Kind::Pow: {
        const Rational& q = *n.exact;
        return constant(q) * pow(n.args[0], Rational(q - 1)) * d(n.args[0]);
    }
    case Kind::Sqrt:
        return d(n.args[0]) / (constant(Rational(2)) * e);
    case Kind::Sin:
        return cos(n.args[0]) * d(n.args[0]);
    case Kind::Cos:
        return -(sin(n.args[0]) * d(n.args[0]));
    case Kind::Exp:
        return e * d(n.args[0]);
    case Kind::Log:
        return d(n.args[0]) / n.args[0];
    }
    return constant(Rational(0));
}

Expr substitute(const Expr& e, std::span<const Expr> replacements) {
    const Node& n = e.node();
    auto s = [&](size_t i) { return substitute(n.args[i], replacements); };
    switch (n.kind) {
    case Kind::Const:
        return e;
    case Kind::Var:
        if (static_cast<size_t>(n.var) >= replacements.size())
            throw InputError("substitute: no replacement for x" + std::to_string(n.var + 1));
        return replacements[static_cast<size_t>(n.var)];
    case Kind::Add:
        return s(0) + s(1);
    case Kind::Sub:
        return s(0) - s(1);
    case Kind::Mul:
        return s(0) * s(1);
    case Kind::Div:
        return s(0) / s(1);
    case Kind::Neg:
        return -s(0);
    case Kind::Pow:
        return pow(s(0), *n.exact);
    case Kind::Sqrt:
        return sqrt(s(0));
    case Kind::Sin:
        return sin(s(0));
    case Kind::Cos:
        return cos(s(0));
    case Kind::Exp:
        return exp(s(0));
    case Kind::Log:
        return log(s(0));
    }
    return e;
}

int variable_count(const Expr& e) {
    const Node& n = e.node();
    int count = n.kind == Kind::Var ? n.var + 1 : 0;
    for (const auto& a : n.args)
        count = std::max(count, variable_count(a));
    return count;
}

namespace {

int precedence(const Expr& e) {
    switch (e.kind()) {
    case Kind::Add:
    case Kind::Sub:
        return 1;
    case Kind::Mul:
    case Kind::Div:
        return 2;
    case Kind::Neg:
        return 3;
    case Kind::Pow:
        return 4;
    case Kind::Const: {
        const Node& n = e.node();
        // Negative or fractional constants print parenthesized.
        if (n.exact)
            return (*n.exact < 0 || n.exact->get_den() != 1) ? 0 : 5;
        return n.value < 0 || std::signbit(n.value) ? 0 : 5;
    }
    default:
        return 5;
    }
}

std::string const_text(const Node& n) {
    if (n.exact)
        return n.exact->get_str();
    if (n.value == std::numbers::pi)
        return "pi";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", n.value);
    std::string s = buf;
    if (s == "inf" || s == "-inf" || s == "nan" || s == "-nan")
        throw InputError("cannot print a non-finite constant");
    return s;
}

void print(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool wrap, std::string& out) {
    if (wrap)
        out += '(';
    print(e, out);
    if (wrap)
        out += ')';
}

void print(const Expr& e, std::string& out) {
    const Node& n = e.node();
    const int p = precedence(e);
    auto binary = [&](const char* op) {
        print_wrapped(n.args[0], precedence(n.args[0]) < p, out);
        out += op;
        print_wrapped(n.args[1], precedence(n.args[1]) <= p, out);
    };
    switch (n.kind) {
    case Kind::Const:
        out += const_text(n);
        return;
    case Kind::Var:
        out += "x" + std::to_string(n.var + 1);
        return;
    case Kind::Add:
        return binary(" + ");
    case Kind::Sub:
        return binary(" - ");
    case Kind::Mul:
        return binary("*");
    case Kind::Div:
        return binary("/");
    case Kind::Neg:
        out += '-';
        print_wrapped(n.args[0], precedence(n.args[0]) < 3, out);
        return;
    case Kind::Pow: {
        print_wrapped(n.args[0], precedence(n.args[0]) <= 4, out);
        out += '^';
        const Rational& q = *n.exact;
        if (q >= 0 && q.get_den() == 1)
            out += q.get_str();
        else
            out += "(" + q.get_str() + ")";
        return;
    }
    case Kind::Sqrt:
    case Kind::Sin:
    case Kind::Cos:
    case Kind::Exp:
    case Kind::Log: {
        static const char* names[] = {"sqrt", "sin", "cos", "exp", "log"};
        out += names[static_cast<int>(n.kind) - static_cast<int>(Kind::Sqrt)];
        out += '(';
        print(n.args[0], out);
        out += ')';
        return;
    }
    }
}

} // namespace

std::string to_string(const Expr& e) {
    std::string out;
    print(e, out);
    return out;
}

MultiPoly to_polynomial(const Expr& e, int dimension) {
    const Node& n = e.node();
    auto sub = [&](size_t i) { return to_polynomial(n.args[i], dimension); };
    switch (n.kind) {
    case Kind::Const:
        return MultiPoly::constant(dimension, n.exact ? *n.exact : rational_from_double(n.value));
    case Kind::Var:
        return MultiPoly::variable(dimension, n.var);
    case Kind::Add:
        return sub(0) + sub(1);
    case Kind::Sub:
        return sub(0) - sub(1);
    case Kind::Mul:
        return sub(0) * sub(1);
    case Kind::Div: {
        const MultiPoly den = sub(1);
        if (den.degree() != 0)
            throw InputError("not a polynomial: division by a non-constant");
        return sub(0) * Rational(1 / den.terms().begin()->second);
    }
    case Kind::Neg:
        return sub(0) * Rational(-1);
    case Kind::Pow: {
        const Rational& q = *n.exact;
        if (q.get_den() != 1 || q < 0 || !q.get_num().fits_slong_p())
            throw InputError("not a polynomial: exponent must be a non-negative integer");
        const MultiPoly base = sub(0);
        MultiPoly out = MultiPoly::constant(dimension, 1);
        for (long k = 0; k < q.get_num().get_si(); ++k)
            out = out * base;
        return out;
    }
    default:
        throw InputError("not a polynomial: transcendental function");
    }
}

MultiPoly parse_polynomial(std::string_view text, int dimension) {
    return to_polynomial(parse(text, dimension), dimension);
}

} // namespace kt::expr
