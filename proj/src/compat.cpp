#include "kt/compat.hpp"

#include "kt/errors.hpp"
#include "kt/invariants.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace kt::compat {

namespace {

void collect_factors(const Expr& e, std::vector<Expr>& out) {
    const expr::Node& n = e.node();
    switch (n.kind) {
    case expr::Kind::Div:
        if (!n.args[1].is_const())
            out.push_back(n.args[1]);
        break;
    case expr::Kind::Pow:
        if (!n.args[0].is_const() && (*n.exact < 0 || n.exact->get_den() != 1))
            out.push_back(n.args[0]);
        break;
    case expr::Kind::Sqrt:
    case expr::Kind::Log:
        if (!n.args[0].is_const())
            out.push_back(n.args[0]);
        break;
    default:
        break;
    }
    for (const auto& a : n.args)
        collect_factors(a, out);
}

double finite_or_throw(double v, const char* what, Point2 x) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << what << " is not finite at (" << x.x1 << ", " << x.x2 << ")";
        throw NumericError(os.str());
    }
    return v;
}

struct BdTerms {
    double residual = 0.0;
    double magnitude = 0.0; // sum of |terms|, the scale of the residual
};

BdTerms bd_terms(const KillingTensorE2& k, const Potential& v, Point2 x) {
    const auto& [b1, b2, b3, b4, b5, b6] = k.beta;
    const Sym2 kx = e2::evaluate(k, x);
    const Point2 g = v.gradient(x);
    const Sym2 h = v.hessian(x);
    const double d2k11 = 2.0 * b4 + 2.0 * b6 * x.x2;
    const double d1k12 = -b4 - b6 * x.x2;
    const double d2k12 = -b5 - b6 * x.x1;
    const double d1k22 = 2.0 * b5 + 2.0 * b6 * x.x1;
    (void)b1;
    (void)b2;
    (void)b3;
    const double t[8] = {d1k12 * g.x1,   kx.a12 * h.a11,  d1k22 * g.x2,   kx.a22 * h.a12,
                         -d2k11 * g.x1, -kx.a11 * h.a12, -d2k12 * g.x2, -kx.a12 * h.a22};
    BdTerms out;
    for (double term : t) {
        out.residual += term;
        out.magnitude += std::abs(term);
    }
    return out;
}

constexpr double kCompatTol = 1e-8;

bool compatible_at(const KillingTensorE2& k, const Potential& v, Point2 x) {
    const BdTerms t = bd_terms(k, v, x);
    return std::abs(t.residual) <= kCompatTol * (1.0 + t.magnitude);
}

// Integral of 2 K dV along a -> b. With `check`, the compatibility residual is
// tested at every quadrature node.
double segment_integral(const KillingTensorE2& k, const Potential& v, Point2 a, Point2 b, bool check,
                        int pieces = 16) {
    const Point2 d = b - a;
    if (d.x1 == 0.0 && d.x2 == 0.0)
        return 0.0;
    auto f = [&](double t) {
        const Point2 x = a + t * d;
        if (v.singular_distance(x) < 1e-6) {
            std::ostringstream os;
            os << "path passes through a singularity of V near (" << x.x1 << ", " << x.x2 << ")";
            throw NumericError(os.str());
        }
        if (check && !compatible_at(k, v, x)) {
            std::ostringstream os;
            os << "K is not compatible with V at (" << x.x1 << ", " << x.x2 << ")";
            throw PreconditionError(os.str());
        }
        const Point2 w = e2::evaluate(k, x).apply(v.gradient(x));
        return 2.0 * e2::dot(w, d);
    };
    // Composite fixed-order rule; the integrand is often zero up to roundoff,
    // which defeats relative error control of adaptive schemes.
    double val = 0.0;
    for (int i = 0; i < pieces; ++i)
        val += boost::math::quadrature::gauss<double, 20>::integrate(f, double(i) / pieces, double(i + 1) / pieces);
    return finite_or_throw(val, "line integral", b);
}

bool path_clear(const Potential& v, Point2 a, Point2 b) {
    for (int i = 0; i <= 64; ++i) {
        const Point2 x = a + (i / 64.0) * (b - a);
        if (v.singular_distance(x) < 1e-3)
            return false;
    }
    return true;
}

} // namespace

Potential::Potential(Expr e) : expr_(std::move(e)) {
    if (expr::variable_count(expr_) > 2)
        throw InputError("a potential on the plane may only use x1 and x2");
    for (int i = 0; i < 2; ++i) {
        grad_[static_cast<size_t>(i)] = expr::diff(expr_, i);
    }
    hess_[0][0] = expr::diff(grad_[0], 0);
    hess_[0][1] = expr::diff(grad_[0], 1);
    hess_[1][0] = hess_[0][1];
    hess_[1][1] = expr::diff(grad_[1], 1);
    std::vector<Expr> raw;
    collect_factors(expr_, raw);
    for (const auto& s : raw)
        factors_.push_back({s, expr::diff(s, 0), expr::diff(s, 1)});
}

double Potential::value(Point2 x) const {
    return finite_or_throw(expr::eval(expr_, x.x1, x.x2), "V", x);
}

Point2 Potential::gradient(Point2 x) const {
    return {finite_or_throw(expr::eval(grad_[0], x.x1, x.x2), "dV", x),
            finite_or_throw(expr::eval(grad_[1], x.x1, x.x2), "dV", x)};
}

Sym2 Potential::hessian(Point2 x) const {
    return {finite_or_throw(expr::eval(hess_[0][0], x.x1, x.x2), "d2V", x),
            finite_or_throw(expr::eval(hess_[0][1], x.x1, x.x2), "d2V", x),
            finite_or_throw(expr::eval(hess_[1][1], x.x1, x.x2), "d2V", x)};
}

double Potential::singular_distance(Point2 x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : factors_) {
        const double s = expr::eval(f.s, x.x1, x.x2);
        const double g = std::hypot(expr::eval(f.ds1, x.x1, x.x2), expr::eval(f.ds2, x.x1, x.x2));
        double d;
        if (!std::isfinite(s) || !std::isfinite(g))
            d = 0.0;
        else if (s == 0.0)
            d = 0.0;
        else if (g == 0.0)
            d = std::numeric_limits<double>::infinity();
        else
            d = std::abs(s) / g;
        best = std::min(best, d);
    }
    return best;
}

Potential Potential::transported(const e2::IsometrySE2& g) const {
    const e2::IsometrySE2 inv = g.inverse();
    const double c = std::cos(inv.p3);
    const double s = std::sin(inv.p3);
    const Expr x1 = expr::variable(0);
    const Expr x2 = expr::variable(1);
    const Expr y[2] = {expr::constant(c) * x1 - expr::constant(s) * x2 + expr::constant(inv.p1),
                       expr::constant(s) * x1 + expr::constant(c) * x2 + expr::constant(inv.p2)};
    return Potential(expr::substitute(expr_, std::span<const Expr>(y, 2)));
}

Potential parse_potential(std::string_view text) { return Potential(expr::parse(text, 2)); }

Potential kepler() { return parse_potential("1/sqrt(x1^2 + x2^2)"); }

double bd_residual(const KillingTensorE2& k, const Potential& v, Point2 x) { return bd_terms(k, v, x).residual; }

std::vector<Point2> default_samples() {
    std::vector<Point2> out;
    for (int ring = 0; ring < 2; ++ring) {
        const double r = ring == 0 ? 1.0 : std::numbers::e;
        const double offset = ring == 0 ? 0.5 : 0.75;
        for (int k = 0; k < 8; ++k) {
            const double a = (k + offset) * std::numbers::pi / 4.0;
            out.push_back({r * std::cos(a), r * std::sin(a)});
        }
    }
    return out;
}

namespace {

std::array<double, 6> normalized_row(const Potential& v, Point2 x) {
    std::array<double, 6> row{};
    for (size_t k = 0; k < 6; ++k) {
        KillingTensorE2 e;
        e.beta[k] = 1.0;
        row[k] = bd_residual(e, v, x);
    }
    double n = 0.0;
    for (double r : row)
        n += r * r;
    n = std::sqrt(n);
    if (n > 0.0)
        for (double& r : row)
            r /= n;
    return row;
}

CompatibleSubspace nullspace(const std::vector<std::array<double, 6>>& rows) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), 6);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t k = 0; k < 6; ++k)
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::VectorXd sv = svd.singularValues();
    CompatibleSubspace out;
    out.singular_values.assign(sv.data(), sv.data() + sv.size());
    while (out.singular_values.size() < 6)
        out.singular_values.push_back(0.0);
    const double smax = out.singular_values[0];
    int rank = 0;
    for (double s : out.singular_values)
        if (smax > 0.0 && s > 1e-10 * smax)
            ++rank;
    out.dimension = 6 - rank;
    if (rank > 0 && rank < 6) {
        const double below = out.singular_values[static_cast<size_t>(rank)];
        out.gap_ratio = below > 0.0 ? out.singular_values[static_cast<size_t>(rank - 1)] / below
                                    : std::numeric_limits<double>::infinity();
    }
    const Eigen::MatrixXd& vm = svd.matrixV();
    for (int j = rank; j < 6; ++j) {
        KillingTensorE2 b;
        size_t big = 0;
        for (size_t k = 0; k < 6; ++k) {
            b.beta[k] = vm(static_cast<Eigen::Index>(k), j);
            if (std::abs(b.beta[k]) > std::abs(b.beta[big]) + 1e-12)
                big = k;
        }
        if (b.beta[big] < 0)
            b = -1.0 * b;
        out.basis.push_back(b);
    }
    return out;
}

} // namespace

CompatibleSubspace compatible_subspace(const Potential& v, const std::vector<Point2>& samples,
                                       std::uint64_t seed) {
    if (samples.size() < 8)
        throw PreconditionError("compatible_subspace needs at least 8 sample points, got " +
                                std::to_string(samples.size()));
    std::vector<std::array<double, 6>> rows;
    for (const auto& x : samples)
        rows.push_back(normalized_row(v, x));
    CompatibleSubspace out = nullspace(rows);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> radius(0.7, 2.5);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    int added = 0;
    for (int attempt = 0; added < 4 && attempt < 200; ++attempt) {
        const double r = radius(rng);
        const double a = angle(rng);
        const Point2 x{r * std::cos(a), r * std::sin(a)};
        try {
            if (v.singular_distance(x) < 1e-3)
                continue;
            rows.push_back(normalized_row(v, x));
            ++added;
        } catch (const NumericError&) {
        }
    }
    if (added < 4)
        throw NumericError("could not draw 4 regular resampling points for V");
    const CompatibleSubspace check = nullspace(rows);
    if (check.dimension != out.dimension)
        throw NumericError("degenerate sampling: dimension " + std::to_string(out.dimension) + " became " +
                           std::to_string(check.dimension) + " with 4 extra samples");
    return out;
}

CompatibleSubspace compatible_subspace(const Potential& v, std::uint64_t seed) {
    return compatible_subspace(v, default_samples(), seed);
}

std::array<double, 4> pde_residuals(const Potential& v, Point2 x) {
    const Point2 g = v.gradient(x);
    const Sym2 h = v.hessian(x);
    const double x1 = x.x1, x2 = x.x2;
    const double v1 = g.x1, v2 = g.x2, v11 = h.a11, v12 = h.a12, v22 = h.a22;
    return {2 * x2 * v1 - 2 * x1 * v2 - x1 * x2 * (v22 - v11) + (x2 * x2 - x1 * x1) * v12,
            3 * v2 + x2 * (v22 - v11) + 2 * x1 * v12,
            3 * v1 + x1 * (v11 - v22) + 2 * x2 * v12,
            x2 * v1 - x1 * v2};
}

bool KeplerReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

KeplerReport verify_kepler_theorem(std::uint64_t seed) {
    KeplerReport rep;
    auto add = [&rep](std::string name, bool ok, std::string detail) {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    auto fmt = [](double d) {
        std::ostringstream os;
        os.precision(3);
        os << d;
        return os.str();
    };

    const Potential v = kepler();
    const CompatibleSubspace cs = compatible_subspace(v, seed);
    rep.dimension = cs.dimension;
    add("dimension", cs.dimension == 4, "compatible space has dimension " + std::to_string(cs.dimension));
    double worst = 0.0;
    for (const auto& b : cs.basis)
        worst = std::max({worst, std::abs(b[0] - b[1]), std::abs(b[2])});
    add("constraints", !cs.basis.empty() && worst < 1e-8, "max |b1 - b2|, |b3| over the basis = " + fmt(worst));
    add("gap", cs.gap_ratio > 1e6, "singular value gap " + fmt(cs.gap_ratio));

    // Two members of the family b1 = b2, b3 = 0 with different (b4^2 + b5^2) / b6.
    const KillingTensorE2 k1{{0, 0, 0, 0, 1, 1}};
    const KillingTensorE2 k2{{0, 0, 0, 1, 0, 2}};
    bool members_ok = true;
    bool foci_ok = true;
    for (const auto& k : {k1, k2}) {
        for (const auto& x : default_samples())
            members_ok = members_ok && compatible_at(k, v, x);
        members_ok = members_ok && inv::classify(k) == inv::WebClass::EllipticHyperbolic;
        const auto f = inv::foci(k);
        const Point2 other{-2 * k[4] / k[5], -2 * k[3] / k[5]};
        auto near = [](Point2 a, Point2 b) { return e2::distance(a, b) < 1e-9; };
        foci_ok = foci_ok && ((near(f.f1, {0, 0}) && near(f.f2, other)) || (near(f.f2, {0, 0}) && near(f.f1, other)));
    }
    add("family", members_ok, "both members are compatible and elliptic-hyperbolic");
    add("foci", foci_ok, "foci are (0,0) and (-2 b5/b6, -2 b4/b6)");
    const inv::Resultant res = inv::resultant(k1, k2);
    add("resultant", res.vanishing && std::abs(res.value) < 1e-9, "resultant value " + fmt(res.value));
    const double q1 = inv::k_squared(k1), q2 = inv::k_squared(k2);
    add("distinct", std::abs(q1 - q2) > 1e-9 * (1 + std::abs(q1) + std::abs(q2)),
        "k^2 values " + fmt(q1) + " and " + fmt(q2));

    double pde = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double r = 0.5 + 0.15 * i;
        const double a = 0.3 + 0.7 * i;
        for (double res_i : pde_residuals(v, {r * std::cos(a), r * std::sin(a)}))
            pde = std::max(pde, std::abs(res_i));
    }
    add("pde", pde < 1e-12, "max PDE residual over 20 points " + fmt(pde));

    const CompatibleSubspace perturbed = compatible_subspace(parse_potential("1/sqrt(x1^2+x2^2) + 0.1*x1"), seed);
    rep.perturbed_dimension = perturbed.dimension;
    add("perturbed", perturbed.dimension < 4,
        "perturbed potential has dimension " + std::to_string(perturbed.dimension));
    return rep;
}

double reconstruct_U(const KillingTensorE2& k, const Potential& v, Point2 base, Point2 x) {
    const double straight = segment_integral(k, v, base, x, true);
    const Point2 corners[2] = {{x.x1, base.x2}, {base.x1, x.x2}};
    for (const Point2& c : corners) {
        if (!path_clear(v, base, c) || !path_clear(v, c, x))
            continue;
        const double bent = segment_integral(k, v, base, c, true) + segment_integral(k, v, c, x, true);
        if (std::abs(bent - straight) > 1e-7 * (1.0 + std::abs(straight))) {
            std::ostringstream os;
            os.precision(12);
            os << "path dependence: straight path gives " << straight << ", axis-parallel path " << bent;
            throw NumericError(os.str());
        }
        return straight;
    }
    throw NumericError("no singularity-free axis-parallel path to compare against");
}

FirstIntegral::FirstIntegral(KillingTensorE2 k, Potential v, Point2 base) : FirstIntegral(k, v, base, true) {}

FirstIntegral FirstIntegral::unchecked(KillingTensorE2 k, Potential v, Point2 base) {
    return FirstIntegral(k, std::move(v), base, false);
}

FirstIntegral::FirstIntegral(KillingTensorE2 k, Potential v, Point2 base, bool check)
    : k_(k), v_(std::move(v)), base_(base) {
    if (!check)
        return;
    int tested = 0;
    for (const auto& x : default_samples()) {
        if (v_.singular_distance(x) < 1e-3)
            continue;
        ++tested;
        if (!compatible_at(k_, v_, x)) {
            std::ostringstream os;
            os << "K is not compatible with V at (" << x.x1 << ", " << x.x2 << "), residual "
               << bd_residual(k_, v_, x);
            throw PreconditionError(os.str());
        }
    }
    if (tested == 0)
        throw NumericError("no regular point to test compatibility at");
}

double FirstIntegral::U(Point2 x) const { return segment_integral(k_, v_, base_, x, false, 2); }

double FirstIntegral::operator()(Point2 x, Point2 p) const {
    const Sym2 kx = e2::evaluate(k_, x);
    return kx.a11 * p.x1 * p.x1 + 2.0 * kx.a12 * p.x1 * p.x2 + kx.a22 * p.x2 * p.x2 + U(x);
}

} // namespace kt::compat
