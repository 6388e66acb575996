#include "kt/multipoly.hpp"

#include "kt/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace kt {

MultiPoly::MultiPoly(int dimension) : dim_(dimension) {
    if (dimension < 1)
        throw InputError("polynomial dimension must be positive");
}

MultiPoly MultiPoly::constant(int dimension, const Rational& c) {
    MultiPoly p(dimension);
    p.add_term(Monomial(static_cast<size_t>(dimension), 0), c);
    return p;
}

MultiPoly MultiPoly::variable(int dimension, int index) {
    if (index < 0 || index >= dimension)
        throw InputError("variable index out of range");
    Monomial e(static_cast<size_t>(dimension), 0);
    e[static_cast<size_t>(index)] = 1;
    return monomial(e);
}

MultiPoly MultiPoly::monomial(const Monomial& exponents, const Rational& c) {
    MultiPoly p(static_cast<int>(exponents.size()));
    p.add_term(exponents, c);
    return p;
}

int MultiPoly::degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_)
        d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
    return d;
}

Rational MultiPoly::coefficient(const Monomial& exponents) const {
    auto it = terms_.find(exponents);
    return it == terms_.end() ? Rational(0) : it->second;
}

void MultiPoly::add_term(const Monomial& exponents, const Rational& c) {
    if (static_cast<int>(exponents.size()) != dim_)
        throw InputError("monomial length does not match polynomial dimension");
    if (c == 0)
        return;
    auto [it, inserted] = terms_.try_emplace(exponents, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0)
            terms_.erase(it);
    }
}

MultiPoly MultiPoly::derivative(int index) const {
    MultiPoly out(dim_);
    const auto i = static_cast<size_t>(index);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0)
            continue;
        Monomial d = e;
        --d[i];
        out.terms_.emplace(std::move(d), c * e[i]);
    }
    return out;
}

double MultiPoly::evaluate(const std::vector<double>& x) const {
    double sum = 0.0;
    for (const auto& [e, c] : terms_) {
        double term = c.get_d();
        for (size_t k = 0; k < e.size(); ++k)
            for (int r = 0; r < e[k]; ++r)
                term *= x[k];
        sum += term;
    }
    return sum;
}

Rational MultiPoly::evaluate(const std::vector<Rational>& x) const {
    Rational sum = 0;
    for (const auto& [e, c] : terms_) {
        Rational term = c;
        for (size_t k = 0; k < e.size(); ++k)
            for (int r = 0; r < e[k]; ++r)
                term *= x[k];
        sum += term;
    }
    return sum;
}

void MultiPoly::check_dimension(const MultiPoly& other) const {
    if (other.dim_ != dim_)
        throw InputError("polynomial dimension mismatch");
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& other) {
    check_dimension(other);
    for (const auto& [e, c] : other.terms_)
        add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& other) {
    check_dimension(other);
    for (const auto& [e, c] : other.terms_)
        add_term(e, -c);
    return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& c) {
    if (c == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, v] : terms_)
        v *= c;
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    a.check_dimension(b);
    MultiPoly out(a.dim_);
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) {
            Monomial e(ea.size());
            for (size_t k = 0; k < e.size(); ++k)
                e[k] = ea[k] + eb[k];
            out.add_term(e, ca * cb);
        }
    return out;
}

std::string MultiPoly::to_string() const {
    if (terms_.empty())
        return "0";
    std::vector<std::pair<Monomial, Rational>> ordered(terms_.begin(), terms_.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const auto& l, const auto& r) {
        int dl = std::accumulate(l.first.begin(), l.first.end(), 0);
        int dr = std::accumulate(r.first.begin(), r.first.end(), 0);
        if (dl != dr)
            return dl > dr;
        return l.first > r.first;
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : ordered) {
        Rational mag = abs(c);
        if (first) {
            if (c < 0)
                os << '-';
        } else {
            os << (c < 0 ? " - " : " + ");
        }
        first = false;
        std::vector<std::string> factors;
        for (size_t k = 0; k < e.size(); ++k) {
            if (e[k] == 0)
                continue;
            std::string f = "x" + std::to_string(k + 1);
            if (e[k] > 1)
                f += "^" + std::to_string(e[k]);
            factors.push_back(f);
        }
        if (factors.empty() || mag != 1) {
            // A fractional coefficient followed by '*' parses as (p/q)*..., so
            // no parentheses are needed.
            factors.insert(factors.begin(), mag.get_str());
        }
        for (size_t k = 0; k < factors.size(); ++k)
            os << (k ? "*" : "") << factors[k];
    }
    return os.str();
}

std::vector<Monomial> monomials_of_degree(int dimension, int degree) {
    std::vector<Monomial> out;
    if (degree < 0)
        return out;
    Monomial e(static_cast<size_t>(dimension), 0);
    // Recursive fill: remaining budget distributed left to right, enumerated so
    // the result is lexicographically ascending.
    auto fill = [&](auto&& self, size_t pos, int remaining) -> void {
        if (pos + 1 == e.size()) {
            e[pos] = remaining;
            out.push_back(e);
            return;
        }
        for (int v = 0; v <= remaining; ++v) {
            e[pos] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    fill(fill, 0, degree);
    return out;
}

std::vector<Monomial> monomials_up_to(int dimension, int max_degree) {
    std::vector<Monomial> out;
    for (int d = 0; d <= max_degree; ++d) {
        auto part = monomials_of_degree(dimension, d);
        out.insert(out.end(), part.begin(), part.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace kt
