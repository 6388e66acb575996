#pragma once

#include "kt/e2core.hpp"

#include <array>
#include <string>

namespace kt::inv {

using e2::IsometrySE2;
using e2::KillingTensorE2;
using e2::Point2;

struct InvariantTriple {
    double d1 = 0.0;
    double d2 = 0.0;
    double d3 = 0.0; // sum of squares, never negative
};

struct InvariantTripleExact {
    Rational d1, d2, d3;
};

enum class WebClass { Cartesian, Polar, Parabolic, EllipticHyperbolic, Trivial };

std::string to_string(WebClass c);

/// D'1 = b6, D'2 = b6 (b1 + b2) - b4^2 - b5^2,
/// D'3 = (b6 (b1 - b2) - b4^2 + b5^2)^2 + 4 (b6 b3 + b4 b5)^2.
InvariantTriple fundamental_invariants(const KillingTensorE2& k);
InvariantTripleExact fundamental_invariants(const e2::KillingTensorE2Exact& k);

/// Zero tests are relative: |D'i| <= tol |beta|^deg with degrees 1, 2, 4, so the
/// class does not change when K is rescaled.
WebClass classify(const KillingTensorE2& k, double tol = 1e-12);
/// Exact classification of a rational tensor (zero means zero).
WebClass classify(const e2::KillingTensorE2Exact& k);

/// Squared half focal distance sqrt(D'3) / D'1^2; elliptic-hyperbolic only.
double k_squared(const KillingTensorE2& k, double tol = 1e-12);

struct FociPair {
    Point2 f1; // lexicographically larger focus
    Point2 f2;
    bool used_oracle = false; // closed form failed the residual test
};

/// Foci from the closed form: center (-b5, -b4)/b6 offset by (+-a, +-b)/b6,
/// a = sqrt((sqrt(D'3) - s)/2), b = sqrt((sqrt(D'3) + s)/2),
/// s = b4^2 - b5^2 + b6 (b2 - b1). The two sign combinations that annihilate
/// the singular-point residuals are kept.
FociPair foci(const KillingTensorE2& k, double tol = 1e-12);

struct JointInvariantVector {
    std::array<double, 10> d{}; // d[0] = D'1 ... d[9] = D'10
    double operator[](size_t i) const { return d[i]; }
};

/// Joint invariants of the pair. The first three use K2 (alpha), the next
/// three K1 (beta); F1, F2 are the foci of K1 and F3, F4 those of K2;
/// d7 = |F2F3|^2, d8 = |F1F3|^2, d9 = |F2F4|^2, d10 = |F1F4|^2.
/// The foci are labeled from the pair itself: F1F3 is the closest cross
/// pair (so d8 is the resultant), ties broken by larger d7, then smaller d9.
JointInvariantVector joint_invariants(const KillingTensorE2& k1, const KillingTensorE2& k2,
                                      double tol = 1e-12);

struct Resultant {
    double value = 0.0;
    bool vanishing = false;
};

/// Minimum squared distance over the four cross pairs of foci; vanishing iff
/// value < tol (1 + max(k1^2, k2^2))^2.
Resultant resultant(const KillingTensorE2& k1, const KillingTensorE2& k2, double tol = 1e-9);

/// cos of the angle at F1 between F1F3 and F1F2, labels as in joint_invariants.
double angle_invariant(const KillingTensorE2& k1, const KillingTensorE2& k2, double tol = 1e-12);

struct CanonicalForm {
    KillingTensorE2 tensor;
    IsometrySE2 transform; // tensor == act_on_params(transform, input)
};

/// Moves the web center to the origin and the focal axis onto the x1-axis.
CanonicalForm canonical_form(const KillingTensorE2& k, double tol = 1e-12);

struct FrameInvariants {
    double delta1 = 0.0; // -Gamma_12^1
    double delta2 = 0.0; // -Gamma_22^1
};

/// Connection coefficients of the eigenframe by central differences of the
/// eigenvector fields. h <= 0 selects 1e-5 (1 + |x|).
FrameInvariants frame_invariants(const KillingTensorE2& k, Point2 x, double h = 0.0);

struct RankReport {
    int rank = 0;
    std::array<double, 9> singular_values{}; // of the 9x12 Jacobian, descending
    /// sigma_9 of the d1..d9 Jacobian over sigma_10 of the d1..d10 Jacobian.
    double gap_ratio = 0.0;
};

/// Numerical rank of the Jacobian of (d1..d9) with respect to the 12
/// parameters (alpha, beta). Rows are normalized before the SVD.
RankReport independence_rank(const KillingTensorE2& k1, const KillingTensorE2& k2,
                             double h = 1e-5);

} // namespace kt::inv
