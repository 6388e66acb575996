#pragma once

#include "kt/e2core.hpp"
#include "kt/expr.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace kt::compat {

using e2::KillingTensorE2;
using e2::Point2;
using e2::Sym2;
using expr::Expr;

/// A potential V(x1, x2) with its symbolic gradient and Hessian.
class Potential {
public:
    explicit Potential(Expr e);

    const Expr& expr() const { return expr_; }
    const Expr& grad(int i) const { return grad_[static_cast<size_t>(i)]; }
    const Expr& hess(int i, int j) const { return hess_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    std::string text() const { return expr::to_string(expr_); }

    // The evaluators throw NumericError on a non-finite result.
    double value(Point2 x) const;
    Point2 gradient(Point2 x) const;
    Sym2 hessian(Point2 x) const;

    /// First-order estimate |s| / |grad s| of the distance from x to the zero
    /// set of the nearest singular factor s (denominators, bases of negative or
    /// fractional powers, sqrt and log arguments). Infinity for smooth V.
    double singular_distance(Point2 x) const;

    /// V o g^-1, i.e. the potential transported by the isometry g.
    Potential transported(const e2::IsometrySE2& g) const;

private:
    Expr expr_;
    std::array<Expr, 2> grad_;
    std::array<std::array<Expr, 2>, 2> hess_;
    struct Factor {
        Expr s;
        Expr ds1;
        Expr ds2;
    };
    std::vector<Factor> factors_;
};

Potential parse_potential(std::string_view text);

/// V = 1/sqrt(x1^2 + x2^2).
Potential kepler();

/// d(K dV) as the scalar d1 w2 - d2 w1 with w_i = K^ij V_j.
double bd_residual(const KillingTensorE2& k, const Potential& v, Point2 x);

/// 16 points on the circles of radius 1 and e, away from the axes.
std::vector<Point2> default_samples();

struct CompatibleSubspace {
    std::vector<KillingTensorE2> basis; // orthonormal in beta coordinates
    int dimension = 0;
    std::vector<double> singular_values; // descending, of the row-normalized system
    /// sigma_r / sigma_(r+1) across the rank cut; infinity when there is no cut.
    double gap_ratio = std::numeric_limits<double>::infinity();
};

/// Killing tensors K with bd_residual(K, V, x) = 0 at all samples. The
/// dimension is rechecked with 4 extra random samples drawn from `seed`.
CompatibleSubspace compatible_subspace(const Potential& v, const std::vector<Point2>& samples,
                                       std::uint64_t seed = 0);
CompatibleSubspace compatible_subspace(const Potential& v, std::uint64_t seed = 0);

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct KeplerReport {
    std::vector<Check> checks;
    int dimension = 0;
    int perturbed_dimension = 0;
    bool passed() const;
};

KeplerReport verify_kepler_theorem(std::uint64_t seed = 0);

/// Residuals of the four linear PDEs whose common solutions are the potentials
/// sharing the Kepler compatible space:
///   2 x2 V1 - 2 x1 V2 - x1 x2 (V22 - V11) + (x2^2 - x1^2) V12
///   3 V2 + x2 (V22 - V11) + 2 x1 V12
///   3 V1 + x1 (V11 - V22) + 2 x2 V12
///   x2 V1 - x1 V2
std::array<double, 4> pde_residuals(const Potential& v, Point2 x);

/// U(x) - U(base) for dU = 2 K dV, integrated along the segment base -> x and
/// compared against an axis-parallel path. Throws PreconditionError when the
/// compatibility residual exceeds 1e-8 on the path, NumericError on a
/// singularity or when the two paths disagree by more than 1e-7.
double reconstruct_U(const KillingTensorE2& k, const Potential& v, Point2 base, Point2 x);

/// F(x, p) = K^ij p_i p_j + U(x), with U(base) = 0.
class FirstIntegral {
public:
    /// Throws PreconditionError unless K is compatible with V.
    FirstIntegral(KillingTensorE2 k, Potential v, Point2 base);
    /// Skips the compatibility test; U is then the straight-segment integral.
    static FirstIntegral unchecked(KillingTensorE2 k, Potential v, Point2 base);

    const KillingTensorE2& tensor() const { return k_; }
    Point2 base() const { return base_; }
    double U(Point2 x) const;
    double operator()(Point2 x, Point2 p) const;

private:
    FirstIntegral(KillingTensorE2 k, Potential v, Point2 base, bool check);
    KillingTensorE2 k_;
    Potential v_;
    Point2 base_;
};

enum class Precision { Double, Quad };

struct FlowOptions {
    Precision precision = Precision::Quad;
    int record_every = 1; // keep every n-th state in the report
};

struct TrajectoryReport {
    std::vector<double> times;
    std::vector<std::array<double, 4>> states; // x1, x2, p1, p2
    double drift_H = 0.0;
    std::vector<double> drift_F;
    long steps = 0;
    bool aborted = false;
    std::string abort_reason;
};

/// Classical RK4 on x' = p, p' = -grad V with a fixed step. The number of
/// steps is horizon / step, which must be an integer to 1e-9. Drifts are
/// max |Q(t) - Q(0)| / |Q(0)| (absolute when |Q(0)| < 1e-12). The run stops
/// early, with aborted set, when the state comes within 1e-3 of a
/// singularity of V or stops being finite.
TrajectoryReport hamiltonian_flow(const Potential& v, Point2 x0, Point2 p0, double step, double horizon,
                                  const std::vector<FirstIntegral>& integrals = {},
                                  const FlowOptions& options = {});

} // namespace kt::compat
