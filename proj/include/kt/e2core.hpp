#pragma once

#include "kt/rational.hpp"
#include "kt/symtensor.hpp"

#include <array>
#include <vector>

namespace kt::e2 {

struct Point2 {
    double x1 = 0.0;
    double x2 = 0.0;

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x1 + b.x1, a.x2 + b.x2}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x1 - b.x1, a.x2 - b.x2}; }
    friend Point2 operator*(double s, Point2 a) { return {s * a.x1, s * a.x2}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

double dot(Point2 a, Point2 b);
double norm(Point2 a);
double distance(Point2 a, Point2 b);
double distance_squared(Point2 a, Point2 b);

/// Symmetric 2x2 matrix [[a11, a12], [a12, a22]].
struct Sym2 {
    double a11 = 0.0;
    double a12 = 0.0;
    double a22 = 0.0;

    Point2 apply(Point2 v) const { return {a11 * v.x1 + a12 * v.x2, a12 * v.x1 + a22 * v.x2}; }
    double frobenius() const;
};

/// Killing two-tensor on the Euclidean plane,
///
///   K11 = b1 + 2 b4 x2 + b6 x2^2
///   K12 = b3 - b4 x1 - b5 x2 - b6 x1 x2
///   K22 = b2 + 2 b5 x1 + b6 x1^2
///
/// The coefficient of d1 (.) d2 is taken as K12 itself (not halved), which is
/// the reading under which these components satisfy the Killing equation.
struct KillingTensorE2 {
    std::array<double, 6> beta{};

    double operator[](size_t i) const { return beta[i]; }
    double norm() const;
    friend bool operator==(const KillingTensorE2&, const KillingTensorE2&) = default;
};

KillingTensorE2 operator+(const KillingTensorE2& a, const KillingTensorE2& b);
KillingTensorE2 operator*(double s, const KillingTensorE2& a);

/// Exact rational mirror of KillingTensorE2 for golden and bridge tests.
struct KillingTensorE2Exact {
    std::array<Rational, 6> beta;

    KillingTensorE2 to_double() const;
    /// The tensor as a valence-2 polynomial tensor on E^2.
    SymPolyTensor to_sym_poly() const;
};

/// Orientation-preserving isometry x -> R(p3) x + (p1, p2).
struct IsometrySE2 {
    double p1 = 0.0;
    double p2 = 0.0;
    double p3 = 0.0;

    static IsometrySE2 identity() { return {}; }
    /// (this o other)(x) = this(other(x)).
    IsometrySE2 compose(const IsometrySE2& other) const;
    IsometrySE2 inverse() const;
};

Point2 act_on_point(const IsometrySE2& g, Point2 x);

/// Rotation part of g applied to a vector.
Point2 rotate(const IsometrySE2& g, Point2 v);

Sym2 evaluate(const KillingTensorE2& k, Point2 x);

/// Induced action on the parameters. This is the pushforward by g:
/// evaluate(act_on_params(g, K), act_on_point(g, x)) = R evaluate(K, x) R^T.
/// It is a left action, act(g1, act(g2, K)) = act(g1 o g2, K).
KillingTensorE2 act_on_params(const IsometrySE2& g, const KillingTensorE2& k);

struct EigenFrame {
    double lambda1 = 0.0; // lambda1 <= lambda2
    double lambda2 = 0.0;
    Point2 e1;
    Point2 e2; // e1 rotated by +90 degrees
    double gap = 0.0;
};

/// Closed-form eigendecomposition of a symmetric 2x2 matrix. e1 has a
/// non-negative first component (ties: non-negative second component).
/// Throws PreconditionError when gap <= tol * (1 + |M|_F).
EigenFrame eigenframe(const Sym2& m, double tol = 1e-12);
EigenFrame eigenframe(const KillingTensorE2& k, Point2 x, double tol = 1e-12);

/// True iff K is a multiple of the metric up to the scale-aware tolerance.
bool is_trivial(const KillingTensorE2& k, double tol = 1e-12);

/// Residuals of the singular-point system (K11 - K22, K12) at x.
std::array<double, 2> singular_residuals(const KillingTensorE2& k, Point2 x);

/// All real points where the eigenvalues of K coincide. Found by eliminating
/// x2 with a resultant (degree <= 4 in x1), companion-matrix roots and 2-D
/// Newton polishing. Points are sorted lexicographically. Throws
/// PreconditionError for a trivial tensor.
std::vector<Point2> singular_points(const KillingTensorE2& k, double tol = 1e-12);

} // namespace kt::e2
