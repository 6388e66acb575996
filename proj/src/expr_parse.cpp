#include "kt/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>

namespace kt::expr {

ParseError::ParseError(Reason reason, size_t position, std::string message, std::string expected)
    : InputError(message + " at position " + std::to_string(position) +
                 (expected.empty() ? "" : " (expected " + expected + ")")),
      reason_(reason), position_(position), expected_(std::move(expected)) {}

namespace {

class Parser {
public:
    Parser(std::string_view text, int max_vars) : s_(text), max_vars_(max_vars) {}

    Expr run() {
        skip();
        if (pos_ >= s_.size())
            throw ParseError(ParseError::Reason::Syntax, pos_, "empty expression", "operand");
        Expr e = sum();
        skip();
        if (pos_ < s_.size()) {
            if (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '(' || s_[pos_] == '.')
                throw ParseError(ParseError::Reason::Syntax, pos_, "implicit multiplication is not allowed",
                                 "operator");
            throw ParseError(ParseError::Reason::Syntax, pos_, std::string("unexpected '") + s_[pos_] + "'",
                             "operator");
        }
        return e;
    }

private:
    std::string_view s_;
    int max_vars_;
    size_t pos_ = 0;

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr sum() {
        Expr e = product();
        for (;;) {
            if (accept('+'))
                e = e + product();
            else if (accept('-'))
                e = e - product();
            else
                return e;
        }
    }

    Expr product() {
        Expr e = unary();
        for (;;) {
            if (accept('*'))
                e = e * unary();
            else if (accept('/'))
                e = e / unary();
            else
                return e;
        }
    }

    Expr unary() {
        if (accept('-'))
            return -unary();
        if (accept('+'))
            return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        skip();
        if (!accept('^'))
            return base;
        skip();
        const size_t at = pos_;
        Expr exponent = unary();
        if (!exponent.is_const())
            throw ParseError(ParseError::Reason::NonDifferentiable, at,
                             "exponent must be a constant", "rational constant");
        const Node& n = exponent.node();
        const Rational q = n.exact ? *n.exact : rational_from_double(n.value);
        return pow(base, q);
    }

    Expr primary() {
        skip();
        if (pos_ >= s_.size())
            throw ParseError(ParseError::Reason::Syntax, pos_, "unexpected end of input", "operand");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Expr e = sum();
            if (!accept(')'))
                throw ParseError(ParseError::Reason::Syntax, pos_, "unbalanced parenthesis", "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return identifier();
        throw ParseError(ParseError::Reason::Syntax, pos_, std::string("unexpected '") + c + "'", "operand");
    }

    Expr number() {
        const size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
            ++pos_;
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            size_t k = pos_ + 1;
            if (k < s_.size() && (s_[k] == '+' || s_[k] == '-'))
                ++k;
            if (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) {
                pos_ = k;
                while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
                    ++pos_;
            }
        }
        const std::string_view lit = s_.substr(start, pos_ - start);
        try {
            return constant(parse_rational(lit));
        } catch (const std::exception&) {
            throw ParseError(ParseError::Reason::Syntax, start, "malformed number '" + std::string(lit) + "'",
                             "number");
        }
    }

    Expr identifier() {
        const size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        const std::string name(s_.substr(start, pos_ - start));
        if (name == "pi")
            return constant(std::numbers::pi);
        if (name.size() >= 2 && name[0] == 'x' && name.find_first_not_of("0123456789", 1) == std::string::npos &&
            name[1] != '0') {
            const int idx = std::atoi(name.c_str() + 1);
            if (idx >= 1 && idx <= max_vars_)
                return variable(idx - 1);
        }
        static const char* funcs[] = {"sqrt", "sin", "cos", "exp", "log"};
        for (int f = 0; f < 5; ++f) {
            if (name == funcs[f]) {
                if (!accept('('))
                    throw ParseError(ParseError::Reason::Syntax, pos_, "function call needs parentheses", "'('");
                Expr a = sum();
                if (!accept(')'))
                    throw ParseError(ParseError::Reason::Syntax, pos_, "unbalanced parenthesis", "')'");
                switch (f) {
                case 0: return sqrt(a);
                case 1: return sin(a);
                case 2: return cos(a);
                case 3: return exp(a);
                default: return log(a);
                }
            }
        }
        if (name == "abs" || name == "min" || name == "max" || name == "floor" || name == "ceil" ||
            name == "sign" || name == "round")
            throw ParseError(ParseError::Reason::NonDifferentiable, start,
                             "'" + name + "' is not differentiable", "smooth function");
        std::string allowed = "x1";
        if (max_vars_ > 1)
            allowed += "..x" + std::to_string(max_vars_);
        throw ParseError(ParseError::Reason::UnknownIdentifier, start, "unknown identifier '" + name + "'",
                         allowed + ", pi, sqrt, sin, cos, exp, log");
    }
};

} // namespace

Expr parse(std::string_view text, int max_vars) { return Parser(text, max_vars).run(); }

} // namespace kt::expr
