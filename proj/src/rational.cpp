#include "kt/rational.hpp"

#include "kt/errors.hpp"

#include <cctype>
#include <cmath>
#include <string>

namespace kt {
namespace {

Rational parse_decimal(std::string_view text) {
    size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        negative = text[i] == '-';
        ++i;
    }
    std::string digits;
    long exponent = 0;
    bool any_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        digits += text[i++];
        any_digit = true;
    }
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            digits += text[i++];
            --exponent;
            any_digit = true;
        }
    }
    if (!any_digit)
        throw InputError("invalid number '" + std::string(text) + "'");
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        std::string exp_text;
        if (i < text.size() && (text[i] == '+' || text[i] == '-'))
            exp_text += text[i++];
        size_t start = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
            exp_text += text[i++];
        if (i == start || exp_text.size() > 6)
            throw InputError("invalid exponent in '" + std::string(text) + "'");
        exponent += std::stol(exp_text);
    }
    if (i != text.size())
        throw InputError("invalid number '" + std::string(text) + "'");

    Integer mantissa(digits.empty() ? std::string("0") : digits, 10);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
    Rational q = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
    q.canonicalize();
    return negative ? Rational(-q) : q;
}

} // namespace

Rational fraction(long num, long den) {
    if (den == 0)
        throw InputError("zero denominator");
    Rational q{Integer(num), Integer(den)};
    q.canonicalize();
    return q;
}

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front())))
        text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())))
        text.remove_suffix(1);
    auto slash = text.find('/');
    if (slash == std::string_view::npos)
        return parse_decimal(text);
    Rational num = parse_decimal(text.substr(0, slash));
    Rational den = parse_decimal(text.substr(slash + 1));
    if (den == 0)
        throw InputError("zero denominator in '" + std::string(text) + "'");
    Rational q = num / den;
    q.canonicalize();
    return q;
}

Rational rational_from_double(double value) {
    if (!std::isfinite(value))
        throw InputError("cannot convert non-finite value to a rational");
    Rational q(value);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

Integer height(const Rational& q) {
    Integer h = q.get_num() * q.get_den();
    return abs(h);
}

} // namespace kt
