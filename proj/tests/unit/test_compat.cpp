#include "kt/compat.hpp"
#include "kt/errors.hpp"
#include "kt/invariants.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <cmath>

using namespace kt;
using namespace kt::compat;
using e2::act_on_params;
using e2::act_on_point;
using ktgen::rel_diff;

namespace {

const KillingTensorE2 kMetric{{1, 1, 0, 0, 0, 0}};
const KillingTensorE2 kAngular{{0, 0, 0, 0, 0, 1}};

double residual_norm(const CompatibleSubspace& s, const KillingTensorE2& k) {
    // Distance of k from the span of the orthonormal basis.
    std::array<double, 6> rest = k.beta;
    for (const auto& b : s.basis) {
        double c = 0;
        for (size_t i = 0; i < 6; ++i)
            c += b[i] * k[i];
        for (size_t i = 0; i < 6; ++i)
            rest[i] -= c * b[i];
    }
    double n = 0;
    for (double r : rest)
        n += r * r;
    return std::sqrt(n);
}

// V = -1/r, the attractive sign, so (1,0), (0,1) is a circular orbit.
Potential attractive() { return parse_potential("-1/sqrt(x1^2 + x2^2)"); }

} // namespace

TEST_CASE("parse_potential builds gradient and Hessian") {
    const Potential v = parse_potential("x1^2 + x2^2");
    CHECK(v.gradient({1, 2}).x1 == 2.0);
    CHECK(v.gradient({1, 2}).x2 == 4.0);
    const auto h = v.hessian({0.3, 0.1});
    CHECK(h.a11 == 2.0);
    CHECK(h.a12 == 0.0);
    CHECK(h.a22 == 2.0);

    const Potential k = kepler();
    const auto g = k.gradient({1, 2});
    const double r3 = std::pow(5.0, 1.5);
    CHECK(rel_diff(g.x1, -1.0 / r3) < 1e-15);
    CHECK(rel_diff(g.x2, -2.0 / r3) < 1e-15);
    CHECK_THROWS_AS(k.value({0, 0}), NumericError);
    CHECK(std::isinf(v.singular_distance({1, 1})));
    // First-order estimate |s|/|grad s|; the factor x1^2 + x2^2 gives r/2.
    CHECK(k.singular_distance({3, 4}) == doctest::Approx(2.5));
    CHECK_THROWS_AS(parse_potential("x1 + "), InputError);
}

TEST_CASE("bd_residual examples") {
    CHECK(std::abs(bd_residual(kAngular, kepler(), {1, 1})) < 1e-15);
    CHECK(bd_residual(kMetric, parse_potential("sin(x1)*x2^3 + exp(x2)"), {0.4, -1.2}) == doctest::Approx(0.0));
    CHECK(bd_residual({{1, 0, 0, 0, 0, 0}}, parse_potential("x1*x2"), {1, 2}) == -1.0);
    CHECK_THROWS_AS(bd_residual(kMetric, kepler(), {0, 0}), NumericError);
}

TEST_CASE("property: bd_residual is linear in beta") {
    ktgen::Gen gen(701);
    const Potential v = parse_potential("x1^3*x2 - cos(x2) + 1/(1 + x1^2)");
    for (int i = 0; i < 200; ++i) {
        const KillingTensorE2 k1 = gen.beta(), k2 = gen.beta();
        const double a = gen.uniform(-2, 2), b = gen.uniform(-2, 2);
        const e2::Point2 x = gen.point();
        const double lhs = bd_residual(a * k1 + b * k2, v, x);
        const double rhs = a * bd_residual(k1, v, x) + b * bd_residual(k2, v, x);
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1 + std::abs(lhs)) * 100);
    }
}

TEST_CASE("property: bd_residual is equivariant") {
    ktgen::Gen gen(702);
    const std::array<Potential, 3> potentials{kepler(), parse_potential("x1^2*x2 + sin(x1)"),
                                             parse_potential("exp(x1/4)*cos(x2) + x1*x2^2")};
    for (const auto& v : potentials)
        for (int i = 0; i < 100; ++i) {
            const KillingTensorE2 k = gen.beta();
            const e2::IsometrySE2 g = gen.isometry();
            e2::Point2 x = gen.point();
            if (v.singular_distance(x) < 0.2)
                continue;
            const double a = bd_residual(k, v, x);
            const double b = bd_residual(act_on_params(g, k), v.transported(g), act_on_point(g, x));
            CHECK(std::abs(a - b) < 1e-8 * (1 + std::abs(a)));
        }
}

TEST_CASE("compatible subspace of the Kepler potential") {
    const auto s = compatible_subspace(kepler());
    CHECK(s.dimension == 4);
    CHECK(s.gap_ratio > 1e6);
    for (const auto& b : s.basis) {
        CHECK(std::abs(b[0] - b[1]) < 1e-10);
        CHECK(std::abs(b[2]) < 1e-10);
    }
    CHECK(residual_norm(s, kMetric) < 1e-10);
    CHECK(residual_norm(s, kAngular) < 1e-10);
    CHECK(residual_norm(s, {{0, 0, 0, 1, 0, 0}}) < 1e-10);
    CHECK(residual_norm(s, {{1, 0, 0, 0, 0, 0}}) > 0.5);
    // The excluded tensor really fails the residual test.
    CHECK(std::abs(bd_residual({{1, 0, 0, 0, 0, 0}}, kepler(), {1, 2})) > 1e-3);
}

TEST_CASE("compatible subspace of other potentials") {
    CHECK(compatible_subspace(parse_potential("1")).dimension == 6);

    const Potential v = parse_potential("x1*x2");
    const auto a = compatible_subspace(v);
    std::vector<e2::Point2> dense;
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            dense.push_back({-1.9 + 0.53 * i, -1.7 + 0.49 * j});
    const auto b = compatible_subspace(v, dense, 17);
    CHECK(a.dimension == b.dimension);
    for (const auto& k : b.basis)
        CHECK(residual_norm(a, k) < 1e-8);

    CHECK(compatible_subspace(parse_potential("1/sqrt(x1^2+x2^2) + 0.1*x1")).dimension < 4);
    std::vector<e2::Point2> few{{1, 1}, {2, 1}};
    CHECK_THROWS_AS(compatible_subspace(kepler(), few), PreconditionError);
}

TEST_CASE("verify_kepler_theorem") {
    const auto r = verify_kepler_theorem(3);
    for (const auto& c : r.checks)
        CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
    CHECK(r.passed());
    CHECK(r.dimension == 4);
    CHECK(r.perturbed_dimension < 4);

    const KillingTensorE2 k1{{0, 0, 0, 0, 1, 1}}, k2{{0, 0, 0, 1, 0, 2}};
    const auto res = inv::resultant(k1, k2);
    CHECK(res.value < 1e-18);
    CHECK(res.vanishing);
}

TEST_CASE("pde residual examples") {
    for (double r : pde_residuals(kepler(), {1, 2}))
        CHECK(std::abs(r) < 1e-12);
    const auto q = pde_residuals(parse_potential("x1^2+x2^2"), {1, 1});
    CHECK(q[3] == 0.0);
    CHECK(q[1] == 6.0);
    for (double r : pde_residuals(parse_potential("-3/sqrt(x1^2+x2^2) + 5/2"), {0.7, -1.3}))
        CHECK(std::abs(r) < 1e-12);
    const auto inv2 = pde_residuals(parse_potential("-2/(x1^2+x2^2)"), {1, 2});
    CHECK(std::abs(inv2[3]) < 1e-12);
    CHECK(std::abs(inv2[1]) > 1e-3);
    CHECK_THROWS_AS(pde_residuals(kepler(), {0, 0}), NumericError);
}

TEST_CASE("property: Kepler solves the PDE system along a spiral") {
    ktgen::Gen gen(703);
    for (int i = 0; i < 50; ++i) {
        const double r = gen.uniform(0.3, 5), t = gen.uniform(-3.1, 3.1);
        for (double v : pde_residuals(kepler(), {r * std::cos(t), r * std::sin(t)}))
            CHECK(std::abs(v) < 1e-12 * (1 + 1 / (r * r * r)));
    }
}

TEST_CASE("reconstruct_U examples") {
    const Potential v = parse_potential("x1^2 + sin(x2)");
    const e2::Point2 base{0, 0}, x{1, 2};
    CHECK(reconstruct_U(kMetric, v, base, x) == doctest::Approx(2 * (v.value(x) - v.value(base))).epsilon(1e-12));
    CHECK(std::abs(reconstruct_U(kAngular, kepler(), {1, 0}, {-0.5, 2})) < 1e-12);

    const KillingTensorE2 k{{0, 0, 0, 1, 0, 1}};
    const double u1 = reconstruct_U(k, kepler(), {1, 0}, {0.5, 1.5});
    const double u2 = reconstruct_U(k, kepler(), {0.5, 1.5}, {-1, 2});
    const double u3 = reconstruct_U(k, kepler(), {1, 0}, {-1, 2});
    CHECK(std::isfinite(u1));
    CHECK(std::abs(u1 + u2 - u3) < 1e-7 * (1 + std::abs(u3)));

    CHECK_THROWS_AS(reconstruct_U({{1, 0, 0, 0, 0, 0}}, parse_potential("x1*x2"), {0, 0}, {1, 1}),
                    PreconditionError);
    CHECK_THROWS_AS(reconstruct_U(kMetric, kepler(), {-1, 0}, {1, 0}), NumericError);
}

TEST_CASE("property: reconstructed U is path independent for Kepler family members") {
    ktgen::Gen gen(704);
    for (int i = 0; i < 20; ++i) {
        const double l = gen.uniform(-1, 1);
        const KillingTensorE2 k{{l, l, 0, gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1)}};
        const e2::Point2 a{gen.uniform(0.5, 2), gen.uniform(0.5, 2)};
        const e2::Point2 b{gen.uniform(0.5, 2), gen.uniform(0.5, 2)};
        const e2::Point2 c{gen.uniform(0.5, 2), gen.uniform(0.5, 2)};
        const double ab = reconstruct_U(k, kepler(), a, b);
        const double bc = reconstruct_U(k, kepler(), b, c);
        const double ac = reconstruct_U(k, kepler(), a, c);
        CHECK(std::abs(ab + bc - ac) < 1e-7 * (1 + std::abs(ac)));
    }
}

TEST_CASE("first integrals") {
    CHECK_THROWS_AS(FirstIntegral({{1, 0, 0, 0, 0, 0}}, kepler(), {1, 0}), PreconditionError);
    const FirstIntegral l2(kAngular, kepler(), {1, 0});
    // K(p, p) for the angular momentum tensor is (x1 p2 - x2 p1)^2.
    CHECK(l2({1, 2}, {3, -1}) == doctest::Approx(49.0));
    const FirstIntegral h2(kMetric, parse_potential("x1^2"), {0, 0});
    CHECK(h2({1, 0}, {0, 1}) == doctest::Approx(1.0 + 2.0));
}

TEST_CASE("hamiltonian flow on the circular Kepler orbit") {
    const Potential v = attractive();
    const std::vector<FirstIntegral> fs{FirstIntegral(kAngular, v, {1, 0})};
    const auto r = hamiltonian_flow(v, {1, 0}, {0, 1}, 1e-3, 10, fs, {Precision::Quad, 1000});
    CHECK_FALSE(r.aborted);
    CHECK(r.steps == 10000);
    CHECK(r.drift_H < 1e-8);
    REQUIRE(r.drift_F.size() == 1);
    CHECK(r.drift_F[0] < 1e-8);
    CHECK(r.times.back() == doctest::Approx(10.0));
    const auto& s = r.states.back();
    CHECK(std::hypot(s[0], s[1]) == doctest::Approx(1.0).epsilon(1e-9));

    const auto half = hamiltonian_flow(v, {1, 0}, {0, 1}, 5e-4, 10, {}, {Precision::Quad, 1000});
    CHECK(r.drift_H / half.drift_H >= 12.0);
}

TEST_CASE("double precision flow agrees with the quad run") {
    const Potential v = attractive();
    const auto a = hamiltonian_flow(v, {1, 0}, {0, 1.1}, 1e-3, 2, {}, {Precision::Double, 2000});
    const auto b = hamiltonian_flow(v, {1, 0}, {0, 1.1}, 1e-3, 2, {}, {Precision::Quad, 2000});
    for (size_t i = 0; i < 4; ++i)
        CHECK(std::abs(a.states.back()[i] - b.states.back()[i]) < 1e-11);
}

TEST_CASE("incompatible integral drifts far more than the energy") {
    const Potential v = parse_potential("x1");
    const std::vector<FirstIntegral> fs{FirstIntegral::unchecked(kAngular, v, {0, 0})};
    const auto r = hamiltonian_flow(v, {1, 0.5}, {0, 1}, 1e-3, 5, fs, {Precision::Double, 100});
    REQUIRE(r.drift_F.size() == 1);
    CHECK(r.drift_F[0] > 1e3 * std::max(r.drift_H, 1e-16));
}

TEST_CASE("flow input checks and aborts") {
    const Potential v = attractive();
    CHECK_THROWS_AS(hamiltonian_flow(v, {1, 0}, {0, 1}, 3e-3, 1), InputError);
    CHECK_THROWS_AS(hamiltonian_flow(v, {1e-5, 0}, {0, 1}, 1e-3, 1), PreconditionError);
    const auto r = hamiltonian_flow(v, {1, 0}, {0, 0}, 1e-3, 5, {}, {Precision::Double, 1});
    CHECK(r.aborted);
    CHECK_FALSE(r.abort_reason.empty());
    CHECK(r.steps < 5000);
    CHECK(r.states.size() == r.times.size());
}
