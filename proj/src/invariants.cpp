#include "kt/invariants.hpp"

#include "kt/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>

namespace kt::inv {

using e2::distance_squared;
using e2::Sym2;

std::string to_string(WebClass c) {
    switch (c) {
    case WebClass::Cartesian:
        return "cartesian";
    case WebClass::Polar:
        return "polar";
    case WebClass::Parabolic:
        return "parabolic";
    case WebClass::EllipticHyperbolic:
        return "elliptic-hyperbolic";
    case WebClass::Trivial:
        return "trivial";
    }
    return "unknown";
}

InvariantTriple fundamental_invariants(const KillingTensorE2& k) {
    const auto& [b1, b2, b3, b4, b5, b6] = k.beta;
    const double u = b6 * (b1 - b2) - b4 * b4 + b5 * b5;
    const double v = b6 * b3 + b4 * b5;
    return {b6, b6 * (b1 + b2) - b4 * b4 - b5 * b5, u * u + 4.0 * v * v};
}

InvariantTripleExact fundamental_invariants(const e2::KillingTensorE2Exact& k) {
    const auto& [b1, b2, b3, b4, b5, b6] = k.beta;
    const Rational u = b6 * (b1 - b2) - b4 * b4 + b5 * b5;
    const Rational v = b6 * b3 + b4 * b5;
    return {b6, b6 * (b1 + b2) - b4 * b4 - b5 * b5, u * u + 4 * v * v};
}

WebClass classify(const KillingTensorE2& k, double tol) {
    if (e2::is_trivial(k, tol))
        return WebClass::Trivial;
    const InvariantTriple d = fundamental_invariants(k);
    const double s = k.norm();
    const bool d1_zero = std::abs(d.d1) <= tol * s;
    if (d1_zero) {
        // With D'1 = 0, D'3 = D'2^2, so D'2 alone separates the two rows.
        return std::abs(d.d2) <= tol * s * s ? WebClass::Cartesian : WebClass::Parabolic;
    }
    return std::abs(d.d3) <= tol * s * s * s * s ? WebClass::Polar : WebClass::EllipticHyperbolic;
}

WebClass classify(const e2::KillingTensorE2Exact& k) {
    const auto& b = k.beta;
    if (b[0] == b[1] && b[2] == 0 && b[3] == 0 && b[4] == 0 && b[5] == 0)
        return WebClass::Trivial;
    const InvariantTripleExact d = fundamental_invariants(k);
    if (d.d1 == 0)
        return d.d2 == 0 ? WebClass::Cartesian : WebClass::Parabolic;
    return d.d3 == 0 ? WebClass::Polar : WebClass::EllipticHyperbolic;
}

namespace {

void require_elliptic_hyperbolic(const KillingTensorE2& k, double tol, const char* op) {
    const WebClass c = classify(k, tol);
    if (c != WebClass::EllipticHyperbolic)
        throw PreconditionError(std::string(op) + ": requires an elliptic-hyperbolic tensor, got " +
                                to_string(c));
}

double residual_norm(const KillingTensorE2& k, Point2 x) {
    const auto r = e2::singular_residuals(k, x);
    return std::max(std::abs(r[0]), std::abs(r[1]));
}

bool lex_greater(Point2 a, Point2 b) { return a.x1 != b.x1 ? a.x1 > b.x1 : a.x2 > b.x2; }

FociPair ordered(Point2 a, Point2 b, bool oracle) {
    if (lex_greater(b, a))
        std::swap(a, b);
    return {a, b, oracle};
}

} // namespace

double k_squared(const KillingTensorE2& k, double tol) {
    require_elliptic_hyperbolic(k, tol, "k_squared");
    const InvariantTriple d = fundamental_invariants(k);
    return std::sqrt(d.d3) / (d.d1 * d.d1);
}

FociPair foci(const KillingTensorE2& k, double tol) {
    require_elliptic_hyperbolic(k, tol, "foci");
    const auto& [b1, b2, b3, b4, b5, b6] = k.beta;
    const InvariantTriple d = fundamental_invariants(k);
    const double sigma = b4 * b4 - b5 * b5 + b6 * (b2 - b1);
    const double root = std::sqrt(d.d3);
    const double a = std::sqrt(std::max(0.0, 0.5 * (root - sigma)));
    const double b = std::sqrt(std::max(0.0, 0.5 * (root + sigma)));
    const Point2 center{-b5 / b6, -b4 / b6};

    // The offsets come in antipodal pairs; pick the pair whose worse residual
    // is smaller.
    const Point2 same{a / b6, b / b6};
    const Point2 mixed{a / b6, -b / b6};
    auto pair_residual = [&](Point2 off) {
        return std::max(residual_norm(k, center + off), residual_norm(k, center - off));
    };
    const Point2 off = pair_residual(same) <= pair_residual(mixed) ? same : mixed;
    const Point2 f1 = center + off;
    const Point2 f2 = center - off;

    const double scale = 1.0 + k.norm();
    auto accept = [&](Point2 x) {
        return residual_norm(k, x) <= 1e-8 * scale * (1.0 + e2::dot(x, x));
    };
    if (accept(f1) && accept(f2))
        return ordered(f1, f2, false);

    const auto oracle = e2::singular_points(k, tol);
    if (oracle.size() != 2)
        throw NumericError("foci: branch resolution failed and the singular-point oracle returned " +
                           std::to_string(oracle.size()) + " points");
    return ordered(oracle[0], oracle[1], true);
}

namespace {

void require_non_degenerate(const KillingTensorE2& k, double tol, const char* which) {
    if (classify(k, tol) != WebClass::EllipticHyperbolic)
        throw PreconditionError(std::string("degenerate orbit: ") + which +
                                " is not elliptic-hyperbolic");
}

} // namespace

namespace {

struct Quadrilateral {
    Point2 f1, f2, f3, f4;
};

// Labels the four foci by the pair geometry alone, so the labels move with
// a common isometry: F1F3 is the closest cross pair, then |F2F3| is taken
// as large as possible, then |F2F4| as small as possible.
Quadrilateral label_foci(const KillingTensorE2& k1, const KillingTensorE2& k2, double tol) {
    const FociPair fb = foci(k1, tol);
    const FociPair fa = foci(k2, tol);
    std::optional<Quadrilateral> best;
    std::array<double, 3> best_key{};
    for (int swap_b = 0; swap_b < 2; ++swap_b)
        for (int swap_a = 0; swap_a < 2; ++swap_a) {
            const Quadrilateral q{swap_b ? fb.f2 : fb.f1, swap_b ? fb.f1 : fb.f2, swap_a ? fa.f2 : fa.f1,
                                  swap_a ? fa.f1 : fa.f2};
            const std::array<double, 3> key{distance_squared(q.f1, q.f3), -distance_squared(q.f2, q.f3),
                                            distance_squared(q.f2, q.f4)};
            if (!best || key < best_key) {
                best = q;
                best_key = key;
            }
        }
    return *best;
}

JointInvariantVector joint_vector(const KillingTensorE2& k1, const KillingTensorE2& k2, const Quadrilateral& q) {
    const InvariantTriple a = fundamental_invariants(k2);
    const InvariantTriple b = fundamental_invariants(k1);
    JointInvariantVector out;
    out.d = {a.d1,
             a.d2,
             a.d3,
             b.d1,
             b.d2,
             b.d3,
             distance_squared(q.f2, q.f3),
             distance_squared(q.f1, q.f3),
             distance_squared(q.f2, q.f4),
             distance_squared(q.f1, q.f4)};
    return out;
}

} // namespace

JointInvariantVector joint_invariants(const KillingTensorE2& k1, const KillingTensorE2& k2,
                                      double tol) {
    require_non_degenerate(k1, tol, "K1");
    require_non_degenerate(k2, tol, "K2");
    return joint_vector(k1, k2, label_foci(k1, k2, tol));
}

Resultant resultant(const KillingTensorE2& k1, const KillingTensorE2& k2, double tol) {
    const JointInvariantVector j = joint_invariants(k1, k2);
    const double value = std::min({j[6], j[7], j[8], j[9]});
    const double k2max = std::max(k_squared(k1), k_squared(k2));
    const double threshold = tol * (1.0 + k2max) * (1.0 + k2max);
    return {value, value < threshold};
}

double angle_invariant(const KillingTensorE2& k1, const KillingTensorE2& k2, double tol) {
    require_non_degenerate(k1, tol, "K1");
    require_non_degenerate(k2, tol, "K2");
    const Quadrilateral q = label_foci(k1, k2, tol);
    const Point2 u = q.f3 - q.f1;
    const Point2 v = q.f2 - q.f1;
    const double nu = e2::norm(u), nv = e2::norm(v);
    const double scale = 1.0 + e2::norm(q.f1);
    if (nu <= 1e-12 * scale || nv <= 1e-12 * scale)
        throw PreconditionError("angle_invariant: coincident foci (F1 = F3 or F1 = F2)");
    return e2::dot(u, v) / (nu * nv);
}

CanonicalForm canonical_form(const KillingTensorE2& k, double tol) {
    require_elliptic_hyperbolic(k, tol, "canonical_form");
    const FociPair f = foci(k, tol);
    const Point2 center{-k.beta[4] / k.beta[5], -k.beta[3] / k.beta[5]};
    const Point2 axis = f.f1 - f.f2;
    double theta = std::atan2(axis.x2, axis.x1);
    if (theta > std::numbers::pi / 2)
        theta -= std::numbers::pi;
    else if (theta <= -std::numbers::pi / 2)
        theta += std::numbers::pi;

    IsometrySE2 rot{0.0, 0.0, -theta};
    const Point2 rc = e2::rotate(rot, center);
    const IsometrySE2 g{-rc.x1, -rc.x2, -theta};
    return {e2::act_on_params(g, k), g};
}

namespace {

// Eigenvector field with signs aligned to a reference frame.
std::pair<Point2, Point2> aligned_frame(const KillingTensorE2& k, Point2 y, const e2::EigenFrame& ref) {
    const e2::EigenFrame f = e2::eigenframe(k, y);
    Point2 e1 = f.e1, e2v = f.e2;
    if (e2::dot(e1, ref.e1) < 0.0)
        e1 = -1.0 * e1;
    if (e2::dot(e2v, ref.e2) < 0.0)
        e2v = -1.0 * e2v;
    return {e1, e2v};
}

} // namespace

FrameInvariants frame_invariants(const KillingTensorE2& k, Point2 x, double h) {
    if (h <= 0.0)
        h = 1e-5 * (1.0 + e2::norm(x));
    const Sym2 m = e2::evaluate(k, x);
    const e2::EigenFrame ref = e2::eigenframe(m);
    if (!(ref.gap > 100.0 * h * (1.0 + m.frobenius())))
        throw PreconditionError("frame_invariants: point too close to a singular point");

    // d/dE1 of E2 and d/dE2 of E2.
    const auto [p1_e1, p1_e2] = aligned_frame(k, x + h * ref.e1, ref);
    const auto [m1_e1, m1_e2] = aligned_frame(k, x - h * ref.e1, ref);
    const auto [p2_e1, p2_e2] = aligned_frame(k, x + h * ref.e2, ref);
    const auto [m2_e1, m2_e2] = aligned_frame(k, x - h * ref.e2, ref);
    const Point2 d1_e2 = (0.5 / h) * (p1_e2 - m1_e2);
    const Point2 d2_e2 = (0.5 / h) * (p2_e2 - m2_e2);

    const double gamma_12_1 = e2::dot(d1_e2, ref.e1);
    const double gamma_22_1 = e2::dot(d2_e2, ref.e1);
    return {-gamma_12_1, -gamma_22_1};
}

namespace {

using Params = std::array<double, 12>; // alpha (K2) then beta (K1)

// Joint invariants near a base pair with each tensor's foci matched to the
// base labels by proximity. Differentiating the pair-intrinsic labeling
// instead would cross its ties at symmetric configurations.
std::array<double, 10> joint_from_params(const Params& p, const Quadrilateral& base) {
    KillingTensorE2 k2, k1;
    std::copy(p.begin(), p.begin() + 6, k2.beta.begin());
    std::copy(p.begin() + 6, p.end(), k1.beta.begin());
    const FociPair fb = foci(k1), fa = foci(k2);
    auto keep = [](const FociPair& f, Point2 u, Point2 v) {
        return distance(f.f1, u) + distance(f.f2, v) <= distance(f.f2, u) + distance(f.f1, v);
    };
    const bool kb = keep(fb, base.f1, base.f2), ka = keep(fa, base.f3, base.f4);
    const Quadrilateral q{kb ? fb.f1 : fb.f2, kb ? fb.f2 : fb.f1, ka ? fa.f1 : fa.f2, ka ? fa.f2 : fa.f1};
    return joint_vector(k1, k2, q).d;
}

// Rows are scaled to unit length, except rows at the level of the
// finite-difference noise, which are zeroed.
Eigen::VectorXd singular_values_of(const Eigen::MatrixXd& j, const Eigen::VectorXd& floor) {
    Eigen::MatrixXd scaled = j;
    for (int r = 0; r < scaled.rows(); ++r) {
        const double n = scaled.row(r).norm();
        if (n > floor(r))
            scaled.row(r) /= n;
        else
            scaled.row(r).setZero();
    }
    return Eigen::JacobiSVD<Eigen::MatrixXd>(scaled).singularValues();
}

} // namespace

RankReport independence_rank(const KillingTensorE2& k1, const KillingTensorE2& k2, double h) {
    Params p;
    std::copy(k2.beta.begin(), k2.beta.end(), p.begin());
    std::copy(k1.beta.begin(), k1.beta.end(), p.begin() + 6);
    const auto base = joint_invariants(k1, k2).d; // also the precondition check
    const Quadrilateral labels = label_foci(k1, k2, 1e-12);

    Eigen::MatrixXd jac(10, 12);
    for (int c = 0; c < 12; ++c) {
        const auto ci = static_cast<size_t>(c);
        const double step = h * (1.0 + std::abs(p[ci]));
        Params plus = p, minus = p;
        plus[ci] += step;
        minus[ci] -= step;
        const auto fp = joint_from_params(plus, labels);
        const auto fm = joint_from_params(minus, labels);
        for (int r = 0; r < 10; ++r)
            jac(r, c) = (fp[static_cast<size_t>(r)] - fm[static_cast<size_t>(r)]) / (2.0 * step);
    }

    Eigen::VectorXd floor(10);
    for (int r = 0; r < 10; ++r)
        floor(r) = 1e-7 * (1.0 + std::abs(base[static_cast<size_t>(r)]));
    const Eigen::VectorXd s9 = singular_values_of(jac.topRows(9), floor.head(9));
    const Eigen::VectorXd s10 = singular_values_of(jac, floor);
    RankReport report;
    for (int i = 0; i < 9; ++i) {
        report.singular_values[static_cast<size_t>(i)] = s9(i);
        if (s9(i) > 1e-7 * s9(0))
            ++report.rank;
    }
    report.gap_ratio = s10(9) > 0.0 ? s9(8) / s10(9) : std::numeric_limits<double>::infinity();
    return report;
}

} // namespace kt::inv
