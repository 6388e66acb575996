#include "kt/e2core.hpp"

#include "kt/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace kt::e2 {

double dot(Point2 a, Point2 b) { return a.x1 * b.x1 + a.x2 * b.x2; }
double norm(Point2 a) { return std::hypot(a.x1, a.x2); }
double distance(Point2 a, Point2 b) { return norm(a - b); }
double distance_squared(Point2 a, Point2 b) {
    const Point2 d = a - b;
    return dot(d, d);
}

double Sym2::frobenius() const { return std::sqrt(a11 * a11 + 2.0 * a12 * a12 + a22 * a22); }

double KillingTensorE2::norm() const {
    double s = 0.0;
    for (double b : beta)
        s += b * b;
    return std::sqrt(s);
}

KillingTensorE2 operator+(const KillingTensorE2& a, const KillingTensorE2& b) {
    KillingTensorE2 out;
    for (size_t i = 0; i < 6; ++i)
        out.beta[i] = a.beta[i] + b.beta[i];
    return out;
}

KillingTensorE2 operator*(double s, const KillingTensorE2& a) {
    KillingTensorE2 out;
    for (size_t i = 0; i < 6; ++i)
        out.beta[i] = s * a.beta[i];
    return out;
}

KillingTensorE2 KillingTensorE2Exact::to_double() const {
    KillingTensorE2 k;
    for (size_t i = 0; i < 6; ++i)
        k.beta[i] = beta[i].get_d();
    return k;
}

SymPolyTensor KillingTensorE2Exact::to_sym_poly() const {
    const auto& b = beta;
    auto c = [](const Rational& v) { return MultiPoly::constant(2, v); };
    const MultiPoly x1 = MultiPoly::variable(2, 0);
    const MultiPoly x2 = MultiPoly::variable(2, 1);
    SymPolyTensor t(2, 2);
    t.set_component({0, 0}, c(b[0]) + Rational(2) * b[3] * x2 + b[5] * (x2 * x2));
    t.set_component({0, 1}, c(b[2]) - b[3] * x1 - b[4] * x2 - b[5] * (x1 * x2));
    t.set_component({1, 1}, c(b[1]) + Rational(2) * b[4] * x1 + b[5] * (x1 * x1));
    return t;
}

namespace {

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a <= -std::numbers::pi ? a + 2.0 * std::numbers::pi : a;
}

} // namespace

IsometrySE2 IsometrySE2::compose(const IsometrySE2& other) const {
    const Point2 t = act_on_point(*this, {other.p1, other.p2});
    return {t.x1, t.x2, wrap_angle(p3 + other.p3)};
}

IsometrySE2 IsometrySE2::inverse() const {
    const double c = std::cos(p3), s = std::sin(p3);
    // -R^T t
    return {-(c * p1 + s * p2), -(-s * p1 + c * p2), wrap_angle(-p3)};
}

Point2 rotate(const IsometrySE2& g, Point2 v) {
    const double c = std::cos(g.p3), s = std::sin(g.p3);
    return {v.x1 * c - v.x2 * s, v.x1 * s + v.x2 * c};
}

Point2 act_on_point(const IsometrySE2& g, Point2 x) {
    const Point2 r = rotate(g, x);
    return {r.x1 + g.p1, r.x2 + g.p2};
}

Sym2 evaluate(const KillingTensorE2& k, Point2 x) {
    const auto& b = k.beta;
    return {b[0] + 2.0 * b[3] * x.x2 + b[5] * x.x2 * x.x2,
            b[2] - b[3] * x.x1 - b[4] * x.x2 - b[5] * x.x1 * x.x2,
            b[1] + 2.0 * b[4] * x.x1 + b[5] * x.x1 * x.x1};
}

KillingTensorE2 act_on_params(const IsometrySE2& g, const KillingTensorE2& k) {
    const auto& [b1, b2, b3, b4, b5, b6] = k.beta;
    const double p1 = g.p1, p2 = g.p2;
    const double c = std::cos(g.p3), s = std::sin(g.p3);
    KillingTensorE2 out;
    out.beta[0] = b1 * c * c - 2.0 * b3 * c * s + b2 * s * s - 2.0 * p2 * b4 * c - 2.0 * p2 * b5 * s +
                  b6 * p2 * p2;
    // The beta3 term enters with + here; that sign is what makes this the
    // pushforward (the trace b1 + b2 only changes through translations).
    out.beta[1] = b1 * s * s + 2.0 * b3 * c * s + b2 * c * c - 2.0 * p1 * b5 * c + 2.0 * p1 * b4 * s +
                  b6 * p1 * p1;
    out.beta[2] = (b1 - b2) * s * c + b3 * (c * c - s * s) + (p1 * b4 + p2 * b5) * c +
                  (p1 * b5 - p2 * b4) * s - b6 * p1 * p2;
    out.beta[3] = b4 * c + b5 * s - b6 * p2;
    out.beta[4] = b5 * c - b4 * s - b6 * p1;
    out.beta[5] = b6;
    return out;
}

EigenFrame eigenframe(const Sym2& m, double tol) {
    const double mean = 0.5 * (m.a11 + m.a22);
    const double half_diff = 0.5 * (m.a11 - m.a22);
    const double radius = std::hypot(half_diff, m.a12);
    EigenFrame f;
    f.gap = 2.0 * radius;
    if (!(f.gap > tol * (1.0 + m.frobenius())))
        throw PreconditionError("eigenframe: eigenvalues coincide (singular point of the web)");
    f.lambda1 = mean - radius;
    f.lambda2 = mean + radius;
    // Eigenvector of lambda2 at angle theta; e1 is perpendicular to it.
    const double theta = 0.5 * std::atan2(m.a12, half_diff);
    Point2 e1{-std::sin(theta), std::cos(theta)};
    if (e1.x1 < 0.0 || (e1.x1 == 0.0 && e1.x2 < 0.0))
        e1 = -1.0 * e1;
    f.e1 = e1;
    f.e2 = {-e1.x2, e1.x1};
    return f;
}

EigenFrame eigenframe(const KillingTensorE2& k, Point2 x, double tol) {
    return eigenframe(evaluate(k, x), tol);
}

bool is_trivial(const KillingTensorE2& k, double tol) {
    const double scale = tol * k.norm();
    const auto& b = k.beta;
    return std::abs(b[0] - b[1]) <= scale && std::abs(b[2]) <= scale && std::abs(b[3]) <= scale &&
           std::abs(b[4]) <= scale && std::abs(b[5]) <= scale;
}

std::array<double, 2> singular_residuals(const KillingTensorE2& k, Point2 x) {
    const Sym2 m = evaluate(k, x);
    return {m.a11 - m.a22, m.a12};
}

namespace {

using Poly = std::vector<double>; // ascending coefficients

Poly mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

Poly add(Poly a, const Poly& b, double sb = 1.0) {
    if (a.size() < b.size())
        a.resize(b.size(), 0.0);
    for (size_t i = 0; i < b.size(); ++i)
        a[i] += sb * b[i];
    return a;
}

double eval(const Poly& p, double u) {
    double v = 0.0;
    for (size_t i = p.size(); i-- > 0;)
        v = v * u + p[i];
    return v;
}

// Real roots (with generous imaginary tolerance: clustered multiple roots
// scatter into the complex plane; Newton polishing and the residual check
// discard spurious candidates downstream).
std::vector<double> candidate_roots(Poly p) {
    double maxc = 0.0;
    for (double c : p)
        maxc = std::max(maxc, std::abs(c));
    while (!p.empty() && std::abs(p.back()) <= 1e-14 * maxc)
        p.pop_back();
    if (p.size() <= 1)
        return {};
    const int n = static_cast<int>(p.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        companion(0, i) = -p[static_cast<size_t>(n - 1 - i)] / p[static_cast<size_t>(n)];
        if (i + 1 < n)
            companion(i + 1, i) = 1.0;
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        const auto z = solver.eigenvalues()(i);
        if (std::abs(z.imag()) <= 1e-3 * (1.0 + std::abs(z)))
            roots.push_back(z.real());
    }
    return roots;
}

struct Elimination {
    double a2, a1; // f = a2 v^2 + a1 v + a0(u)
    Poly a0;
    Poly b1, b0; // h = b1(u) v + b0(u)
};

// Returns (u, v) candidates of the system eliminated in v.
std::vector<std::pair<double, double>> solve_eliminated(const Elimination& e, double scale,
                                                        bool& degenerate) {
    Poly res = add(add(mul(Poly{e.a2}, mul(e.b0, e.b0)), mul(Poly{e.a1}, mul(e.b0, e.b1)), -1.0),
                   mul(e.a0, mul(e.b1, e.b1)));
    double maxc = 0.0;
    for (double c : res)
        maxc = std::max(maxc, std::abs(c));
    degenerate = maxc <= 1e-13 * scale * scale * scale;
    std::vector<std::pair<double, double>> out;
    if (degenerate)
        return out;
    for (double u : candidate_roots(res)) {
        const double b1 = eval(e.b1, u), b0 = eval(e.b0, u);
        if (std::abs(b1) > 1e-8 * scale * (1.0 + std::abs(u))) {
            out.emplace_back(u, -b0 / b1);
            continue;
        }
        const double a0 = eval(e.a0, u);
        if (std::abs(e.a2) > 1e-14 * scale) {
            double disc = e.a1 * e.a1 - 4.0 * e.a2 * a0;
            if (disc < 0.0 && disc > -1e-6 * scale * scale)
                disc = 0.0;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                out.emplace_back(u, (-e.a1 + sq) / (2.0 * e.a2));
                out.emplace_back(u, (-e.a1 - sq) / (2.0 * e.a2));
            }
        } else if (std::abs(e.a1) > 1e-14 * scale) {
            out.emplace_back(u, -a0 / e.a1);
        }
    }
    return out;
}

Point2 newton_polish(const KillingTensorE2& k, Point2 x) {
    const auto& b = k.beta;
    for (int it = 0; it < 200; ++it) {
        const auto r = singular_residuals(k, x);
        const double a = -b[4] - b[5] * x.x1;
        const double c = b[3] + b[5] * x.x2;
        // J = [[2a, 2c], [-c, a]]
        const double det = 2.0 * (a * a + c * c);
        if (det == 0.0)
            break;
        const double dx1 = (a * r[0] - 2.0 * c * r[1]) / det;
        const double dx2 = (c * r[0] + 2.0 * a * r[1]) / det;
        x = {x.x1 - dx1, x.x2 - dx2};
        if (std::abs(dx1) + std::abs(dx2) <= 1e-17 * (1.0 + norm(x)))
            break;
    }
    return x;
}

} // namespace

std::vector<Point2> singular_points(const KillingTensorE2& k, double tol) {
    if (is_trivial(k, tol))
        throw PreconditionError("singular_points: tensor is a multiple of the metric");
    const auto& [b1, b2, b3, b4, b5, b6] = k.beta;
    const double scale = 1.0 + k.norm();

    // Eliminate x2: f = b6 x2^2 + 2 b4 x2 + (-b6 x1^2 - 2 b5 x1 + b1 - b2),
    //               h = (-b6 x1 - b5) x2 + (b3 - b4 x1).
    Elimination e2{b6, 2.0 * b4, {b1 - b2, -2.0 * b5, -b6}, {-b5, -b6}, {b3, -b4}};
    bool degenerate = false;
    std::vector<Point2> candidates;
    for (auto [u, v] : solve_eliminated(e2, scale, degenerate))
        candidates.push_back({u, v});
    if (degenerate) {
        // Eliminate x1 instead: f = -b6 x1^2 - 2 b5 x1 + (b6 x2^2 + 2 b4 x2 + b1 - b2),
        //                       h = (-b6 x2 - b4) x1 + (b3 - b5 x2).
        Elimination e1{-b6, -2.0 * b5, {b1 - b2, 2.0 * b4, b6}, {-b4, -b6}, {b3, -b5}};
        for (auto [u, v] : solve_eliminated(e1, scale, degenerate))
            candidates.push_back({v, u});
    }

    std::vector<Point2> points;
    for (Point2 c : candidates) {
        const Point2 x = newton_polish(k, c);
        const auto r = singular_residuals(k, x);
        if (!std::isfinite(x.x1) || !std::isfinite(x.x2))
            continue;
        if (std::abs(r[0]) >= 1e-9 * scale || std::abs(r[1]) >= 1e-9 * scale)
            continue;
        const bool duplicate = std::any_of(points.begin(), points.end(), [&](Point2 q) {
            return distance(q, x) <= 1e-7 * (1.0 + norm(x));
        });
        if (!duplicate)
            points.push_back(x);
    }
    std::sort(points.begin(), points.end(),
              [](Point2 a, Point2 b) { return a.x1 != b.x1 ? a.x1 < b.x1 : a.x2 < b.x2; });
    return points;
}

} // namespace kt::e2
