#include "kt/expr.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <array>
#include <cmath>

using namespace kt;
using namespace kt::expr;
using ktgen::rel_diff;

namespace {

ParseError parse_failure(std::string_view text) {
    try {
        parse(text);
    } catch (const ParseError& e) {
        return e;
    }
    FAIL("expected a parse error for " << text);
    throw;
}

double central(const Expr& e, double x1, double x2, int var) {
    const double h = 1e-6 * (1.0 + std::abs(var == 0 ? x1 : x2));
    if (var == 0)
        return (eval(e, x1 + h, x2) - eval(e, x1 - h, x2)) / (2 * h);
    return (eval(e, x1, x2 + h) - eval(e, x1, x2 - h)) / (2 * h);
}

} // namespace

TEST_CASE("parse and evaluate") {
    CHECK(eval(parse("x1^2 + x2^2"), 3, 4) == 25.0);
    CHECK(eval(parse("2^3^2"), 0, 0) == 512.0);
    CHECK(eval(parse("-2^2"), 0, 0) == -4.0);
    CHECK(eval(parse("1 - 2 - 3"), 0, 0) == -4.0);
    CHECK(eval(parse("12 / 3 / 2"), 0, 0) == 2.0);
    CHECK(eval(parse("x1 * (x2 + 1)"), 2, 3) == 8.0);
    CHECK(eval(parse("2*pi"), 0, 0) == doctest::Approx(2 * std::numbers::pi));
    CHECK(eval(parse("0.25 + 1e-1"), 0, 0) == doctest::Approx(0.35));
    CHECK(eval(parse("sqrt(x1) + log(exp(x2))"), 4, 1.5) == doctest::Approx(3.5));
    CHECK(eval(parse("x1^(-1/2)"), 4, 0) == doctest::Approx(0.5));
    CHECK(variable_count(parse("x2 + 1")) == 2);
    CHECK(variable_count(parse("3")) == 0);
    CHECK(variable_count(parse("x3", 3)) == 3);
}

TEST_CASE("parse errors carry position and expectation") {
    const auto a = parse_failure("x1 + ");
    CHECK(a.reason() == ParseError::Reason::Syntax);
    CHECK(a.position() == 5);
    CHECK(a.expected() == "operand");

    const auto b = parse_failure("2x1");
    CHECK(b.reason() == ParseError::Reason::Syntax);
    CHECK(b.position() == 1);

    const auto c = parse_failure("x1 + y");
    CHECK(c.reason() == ParseError::Reason::UnknownIdentifier);
    CHECK(c.position() == 5);

    CHECK(parse_failure("x3").reason() == ParseError::Reason::UnknownIdentifier);
    CHECK(parse_failure("abs(x1)").reason() == ParseError::Reason::NonDifferentiable);
    CHECK(parse_failure("x1^x2").reason() == ParseError::Reason::NonDifferentiable);
    CHECK(parse_failure("(x1 + 1").reason() == ParseError::Reason::Syntax);
    CHECK(parse_failure("x1 + 1)").reason() == ParseError::Reason::Syntax);
    CHECK(parse_failure("").reason() == ParseError::Reason::Syntax);
    CHECK(parse_failure("sin x1").reason() == ParseError::Reason::Syntax);
    CHECK_THROWS_AS(parse("x1 $ 2"), InputError);
}

TEST_CASE("symbolic gradients") {
    const Expr v = parse("x1^2 + x2^2");
    CHECK(to_string(diff(v, 0)) == "2*x1");
    CHECK(to_string(diff(v, 1)) == "2*x2");

    const Expr kepler = parse("1/sqrt(x1^2 + x2^2)");
    for (const auto& [x1, x2] : std::array<std::pair<double, double>, 3>{{{1, 1}, {0.3, -2}, {-1.5, 0.4}}}) {
        const double r = std::hypot(x1, x2);
        CHECK(rel_diff(eval(diff(kepler, 0), x1, x2), -x1 / (r * r * r)) < 1e-14);
        CHECK(rel_diff(eval(diff(kepler, 1), x1, x2), -x2 / (r * r * r)) < 1e-14);
    }
    CHECK(diff(parse("x2^3"), 0).is_value(0.0));
    CHECK(diff(parse("7"), 1).is_value(0.0));
}

TEST_CASE("constant folding stays exact") {
    CHECK(to_string(parse("1/3 + 1/6")) == "1/2");
    CHECK(to_string(parse("x1 * 1 + 0")) == "x1");
    CHECK(to_string(parse("--x1")) == "x1");
    CHECK(to_string(parse("2*pi")) == "2*pi");
    CHECK(to_string(parse("sqrt(2)*x1")) == "sqrt(2)*x1");
    CHECK(to_string(pow(pow(variable(0), Rational(2)), Rational(3))) == "x1^6");
}

TEST_CASE("substitute") {
    const Expr e = parse("x1 * x2 + x1");
    const std::array<Expr, 2> r{parse("x2 + 1"), constant(Rational(2))};
    CHECK(eval(substitute(e, r), 0, 5) == doctest::Approx(18.0));
    CHECK_THROWS_AS(substitute(e, std::span<const Expr>(r.data(), 1)), InputError);
}

TEST_CASE("polynomial conversion") {
    const MultiPoly p = parse_polynomial("(x1 + x2)^2 - x1/2", 2);
    MultiPoly expected(2);
    expected.add_term({2, 0}, Rational(1));
    expected.add_term({1, 1}, Rational(2));
    expected.add_term({0, 2}, Rational(1));
    expected.add_term({1, 0}, Rational(-1, 2));
    CHECK(p == expected);
    CHECK(parse_polynomial(p.to_string(), 2) == p);
    CHECK_THROWS_AS(parse_polynomial("1/x1", 2), InputError);
    CHECK_THROWS_AS(parse_polynomial("sqrt(x1)", 2), InputError);
}

TEST_CASE("every builtin differentiates like a central difference") {
    const std::array<const char*, 10> texts{
        "sqrt(x1^2 + x2)", "sin(x1*x2)", "cos(x1 - x2)", "exp(x1/x2)", "log(x1 + x2^2)",
        "x1^(-3/2) * x2", "x1 / (1 + x2^2)", "-(x1^3) + x2", "pi*x1^(1/3)", "1/sqrt(x1^2 + x2^2)"};
    for (const char* t : texts) {
        const Expr e = parse(t);
        for (const auto& [x1, x2] : std::array<std::pair<double, double>, 3>{{{1.3, 0.7}, {2.1, 1.9}, {0.6, 2.4}}}) {
            CHECK_MESSAGE(rel_diff(eval(diff(e, 0), x1, x2), central(e, x1, x2, 0)) < 1e-6, t);
            CHECK_MESSAGE(rel_diff(eval(diff(e, 1), x1, x2), central(e, x1, x2, 1)) < 1e-6, t);
        }
    }
}

TEST_CASE("property: random expressions") {
    ktgen::Gen gen(601);
    for (int i = 0; i < 100; ++i) {
        const Expr e = gen.expression(4);
        const double x1 = 2 + gen.uniform(-0.5, 0.5), x2 = 2 + gen.uniform(-0.5, 0.5);
        const double value = eval(e, x1, x2);
        REQUIRE(std::isfinite(value));

        const std::string text = to_string(e);
        const Expr back = parse(text);
        CHECK_MESSAGE(rel_diff(eval(back, x1, x2), value) < 1e-12, text);
        CHECK(to_string(back) == text);

        for (int var = 0; var < 2; ++var) {
            const double sym = eval(diff(e, var), x1, x2);
            const double num = central(e, x1, x2, var);
            CHECK_MESSAGE(rel_diff(sym, num) < 1e-5, text);
        }
    }
}
