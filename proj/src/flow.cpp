#include "kt/compat.hpp"

#include "kt/errors.hpp"

#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace kt::compat {

namespace {

template <class T>
struct State {
    T q[4]; // x1, x2, p1, p2
};

template <class T>
State<T> rhs(const Potential& v, const State<T>& s) {
    const T x[2] = {s.q[0], s.q[1]};
    const std::span<const T> xs(x, 2);
    return {{s.q[2], s.q[3], -expr::eval<T>(v.grad(0), xs), -expr::eval<T>(v.grad(1), xs)}};
}

template <class T>
State<T> axpy(const State<T>& s, const State<T>& d, const T& h) {
    State<T> out;
    for (int i = 0; i < 4; ++i)
        out.q[i] = s.q[i] + h * d.q[i];
    return out;
}

template <class T>
T energy(const Potential& v, const State<T>& s) {
    const T x[2] = {s.q[0], s.q[1]};
    return (s.q[2] * s.q[2] + s.q[3] * s.q[3]) / 2 + expr::eval<T>(v.expr(), std::span<const T>(x, 2));
}

// Smallest first-order distance to the singular set along the segment a-b. A segment
// shorter than the endpoint clearance cannot reach the set, so only such segments stop
// the bisection.
double segment_clearance(const Potential& v, Point2 a, Point2 b, int depth = 0) {
    const double d = std::min(v.singular_distance(a), v.singular_distance(b));
    const double len = std::hypot(b.x1 - a.x1, b.x2 - a.x2);
    if (d >= len || d < 1e-3 || depth >= 16)
        return d;
    const Point2 m{(a.x1 + b.x1) / 2, (a.x2 + b.x2) / 2};
    return std::min(segment_clearance(v, a, m, depth + 1), segment_clearance(v, m, b, depth + 1));
}

double relative(double value, double initial) {
    const double scale = std::abs(initial) < 1e-12 ? 1.0 : std::abs(initial);
    return std::abs(value - initial) / scale;
}

template <class T>
TrajectoryReport run(const Potential& v, Point2 x0, Point2 p0, double step, long n,
                     const std::vector<FirstIntegral>& integrals, int record_every) {
    using std::abs;
    using std::isfinite;
    TrajectoryReport rep;
    State<T> s{{T(x0.x1), T(x0.x2), T(p0.x1), T(p0.x2)}};
    const T h(step);
    const T h0 = energy(v, s);
    std::vector<double> f0;
    for (const auto& f : integrals)
        f0.push_back(f(x0, p0));
    rep.drift_F.assign(integrals.size(), 0.0);

    auto record = [&](long i, const State<T>& st) {
        rep.times.push_back(static_cast<double>(i) * step);
        rep.states.push_back({static_cast<double>(st.q[0]), static_cast<double>(st.q[1]),
                              static_cast<double>(st.q[2]), static_cast<double>(st.q[3])});
    };
    record(0, s);

    for (long i = 1; i <= n; ++i) {
        const State<T> k1 = rhs(v, s);
        const State<T> k2 = rhs(v, axpy(s, k1, h / 2));
        const State<T> k3 = rhs(v, axpy(s, k2, h / 2));
        const State<T> k4 = rhs(v, axpy(s, k3, h));
        State<T> next;
        for (int j = 0; j < 4; ++j)
            next.q[j] = s.q[j] + h / 6 * (k1.q[j] + 2 * k2.q[j] + 2 * k3.q[j] + k4.q[j]);

        bool finite = true;
        for (const T& q : next.q)
            finite = finite && isfinite(q);
        const Point2 x{static_cast<double>(next.q[0]), static_cast<double>(next.q[1])};
        if (!finite) {
            rep.aborted = true;
            rep.abort_reason = "state is no longer finite";
            break;
        }
        const Point2 prev{static_cast<double>(s.q[0]), static_cast<double>(s.q[1])};
        if (segment_clearance(v, prev, x) < 1e-3) {
            std::ostringstream os;
            os << "trajectory within 1e-3 of a singularity of V at t = " << static_cast<double>(i) * step;
            rep.aborted = true;
            rep.abort_reason = os.str();
            break;
        }
        s = next;
        rep.steps = i;
        const T e = energy(v, s);
        const T scale = abs(h0) < T(1e-12) ? T(1) : T(abs(h0));
        rep.drift_H = std::max(rep.drift_H, static_cast<double>(T(abs(e - h0)) / scale));
        const Point2 p{static_cast<double>(s.q[2]), static_cast<double>(s.q[3])};
        for (size_t k = 0; k < integrals.size(); ++k)
            rep.drift_F[k] = std::max(rep.drift_F[k], relative(integrals[k](x, p), f0[k]));
        if (i % record_every == 0 || i == n)
            record(i, s);
    }
    return rep;
}

} // namespace

TrajectoryReport hamiltonian_flow(const Potential& v, Point2 x0, Point2 p0, double step, double horizon,
                                  const std::vector<FirstIntegral>& integrals, const FlowOptions& options) {
    if (!(step > 0.0) || !(horizon > 0.0) || !std::isfinite(step) || !std::isfinite(horizon))
        throw InputError("step and horizon must be positive and finite");
    if (options.record_every < 1)
        throw InputError("record_every must be at least 1");
    const double ratio = horizon / step;
    const long n = std::lround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
        throw InputError("horizon must be an integer multiple of the step");
    if (v.singular_distance(x0) < 1e-3)
        throw PreconditionError("initial point within 1e-3 of a singularity of V");
    (void)v.gradient(x0);
    if (options.precision == Precision::Double)
        return run<double>(v, x0, p0, step, n, integrals, options.record_every);
    return run<boost::multiprecision::float128>(v, x0, p0, step, n, integrals, options.record_every);
}

} // namespace kt::compat
