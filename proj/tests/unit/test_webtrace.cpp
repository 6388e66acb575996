#include "kt/errors.hpp"
#include "kt/webtrace.hpp"

#include "generators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace kt;
using namespace kt::web;
using e2::act_on_params;
using e2::act_on_point;
using e2::distance;
using e2::dot;

namespace {

const KillingTensorE2 kCartesian{{1, 2, 0, 0, 0, 0}};
const KillingTensorE2 kPolar{{0, 0, 0, 0, 0, 1}};
const KillingTensorE2 kParabolic{{0, 0, 0, 1, 0, 0}};
const KillingTensorE2 kEH{{1, 0, 0, 0, 0, 1}};

const Bounds kBox{-3, 3, -3, 3};

size_t count(const std::string& s, const std::string& what) {
    size_t n = 0;
    for (size_t at = s.find(what); at != std::string::npos; at = s.find(what, at + 1))
        ++n;
    return n;
}

void check_polyline(const WebCurve& c, double step, const Bounds& b) {
    for (size_t i = 1; i < c.points.size(); ++i)
        CHECK(distance(c.points[i - 1], c.points[i]) < 2 * step);
    for (const auto& p : c.points)
        CHECK(b.contains(p, step));
    CHECK(c.points.size() == c.tangents.size());
}

double focal_spread(const WebCurve& c) {
    double lo = 1e300, hi = -1e300;
    for (const auto& p : c.points) {
        const double s = distance(p, {1, 0}) + distance(p, {-1, 0});
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    return hi - lo;
}

Bounds moved(const e2::IsometrySE2& g, const Bounds& b) {
    const Point2 a = act_on_point(g, {b.xmin, b.ymin}), c = act_on_point(g, {b.xmax, b.ymax});
    return {std::min(a.x1, c.x1), std::max(a.x1, c.x1), std::min(a.x2, c.x2), std::max(a.x2, c.x2)};
}

} // namespace

TEST_CASE("cartesian curves are straight") {
    const double h = 0.01;
    const WebCurve c = trace_curve(kCartesian, {0.5, 0.5}, 1, h, kBox);
    REQUIRE(c.points.size() > 100);
    for (const auto& p : c.points)
        CHECK(std::abs(p.x2 - 0.5) < 1e-12);
    CHECK(c.ends[0] == Termination::Bounds);
    CHECK(c.ends[1] == Termination::Bounds);
    const auto xs = std::minmax_element(c.points.begin(), c.points.end(),
                                        [](Point2 a, Point2 b) { return a.x1 < b.x1; });
    CHECK(xs.first->x1 < -3 + h);
    CHECK(xs.second->x1 > 3 - h);
    check_polyline(c, h, kBox);

    const WebCurve v = trace_curve(kCartesian, {0.5, 0.5}, 2, h, kBox);
    for (const auto& p : v.points)
        CHECK(std::abs(p.x1 - 0.5) < 1e-12);
}

TEST_CASE("polar tangential family closes into a circle") {
    const double h = 0.01;
    const WebCurve c = trace_curve(kPolar, {1, 0}, 2, h, kBox);
    CHECK(c.terminated_by == Termination::Closed);
    CHECK(to_string(c.terminated_by) == "closed");
    for (const auto& p : c.points)
        CHECK(std::abs(e2::norm(p) - 1.0) < 1e-3);
    CHECK(distance(c.points.front(), c.points.back()) < 2 * h);
    check_polyline(c, h, kBox);

    const WebCurve r = trace_curve(kPolar, {1, 0}, 1, h, kBox);
    for (const auto& p : r.points)
        CHECK(std::abs(p.x2) < 1e-12);
    CHECK(std::find(r.ends.begin(), r.ends.end(), Termination::SingularPoint) != r.ends.end());
    for (const auto& p : r.points)
        CHECK(e2::norm(p) >= 5 * h - 1e-12);
}

TEST_CASE("elliptic-hyperbolic curve through the x2-axis is a confocal ellipse") {
    const double h = 0.01;
    const WebCurve c = trace_curve(kEH, {0, 1}, 2, h, kBox);
    CHECK(c.terminated_by == Termination::Closed);
    CHECK(focal_spread(c) < 1e-3);
    CHECK(std::abs(distance(c.points.front(), {1, 0}) + distance(c.points.front(), {-1, 0}) - 2 * std::sqrt(2.0)) <
          1e-12);
}

TEST_CASE("property: focal sums are constant on ellipses for 10 seeds") {
    const Bounds wide{-4, 4, -4, 4};
    for (int i = 0; i < 10; ++i) {
        const double y = 0.6 + 0.2 * i; // keeps the ellipse more than 5 steps from the foci
        const WebCurve c = trace_curve(kEH, {0, y}, 2, 0.01, wide);
        CHECK(c.terminated_by == Termination::Closed);
        CHECK(focal_spread(c) < 1e-3);
    }
}

TEST_CASE("trace_curve preconditions") {
    CHECK_THROWS_AS(trace_curve(kEH, {1, 0}, 1, 0.01, kBox), PreconditionError);
    CHECK_THROWS_AS(trace_curve(kEH, {1.05, 0}, 1, 0.01, kBox), PreconditionError);
    CHECK_THROWS_AS(trace_curve(kEH, {5, 0}, 1, 0.01, kBox), PreconditionError);
    CHECK_THROWS_AS(trace_curve({{2, 2, 0, 0, 0, 0}}, {0, 0}, 1, 0.01, kBox), PreconditionError);
    CHECK_THROWS_AS(trace_curve(kEH, {0, 1}, 3, 0.01, kBox), InputError);

    TraceOptions few;
    few.max_steps = 10;
    const WebCurve c = trace_curve(kCartesian, {0, 0}, 1, 0.01, kBox, few);
    CHECK(c.terminated_by == Termination::StepLimit);
    CHECK(c.points.size() <= 21);
}

TEST_CASE("build_web markers") {
    const WebFigure eh = build_web(kEH, kBox, 6);
    REQUIRE(eh.markers.size() == 2);
    CHECK(distance(eh.markers[0], {1, 0}) < 1e-12);
    CHECK(distance(eh.markers[1], {-1, 0}) < 1e-12);
    CHECK(eh.web_class == inv::WebClass::EllipticHyperbolic);

    const WebFigure pb = build_web(kParabolic, kBox, 6);
    const auto oracle = e2::singular_points(kParabolic);
    REQUIRE(pb.markers.size() == oracle.size());
    REQUIRE(pb.markers.size() == 1);
    CHECK(pb.markers[0] == oracle[0]);

    const WebFigure ct = build_web(kCartesian, kBox, 6);
    CHECK(ct.markers.empty());
    bool f1 = false, f2 = false;
    for (const auto& c : ct.curves) {
        const Point2 t = c.tangents.front();
        if (c.family == 1) {
            f1 = true;
            CHECK(std::abs(t.x2) < 1e-12);
        } else {
            f2 = true;
            CHECK(std::abs(t.x1) < 1e-12);
        }
    }
    CHECK(f1);
    CHECK(f2);
    CHECK(ct.curves.size() == 12);

    CHECK_THROWS_AS(build_web({{3, 3, 0, 0, 0, 0}}, kBox, 4), PreconditionError);
}

TEST_CASE("property: the two families are orthogonal") {
    ktgen::Gen gen(801);
    for (const auto& k : {kPolar, kParabolic, kEH, gen.elliptic_hyperbolic(), gen.elliptic_hyperbolic()}) {
        const WebFigure fig = build_web(k, kBox, 5);
        for (const auto& c : fig.curves)
            for (size_t i = 0; i < c.points.size(); i += 7) {
                const auto frame = e2::eigenframe(k, c.points[i]);
                const Point2 other = c.family == 1 ? frame.e2 : frame.e1;
                CHECK(std::abs(dot(c.tangents[i], other)) < 1e-6);
            }
        // Crossing pairs traced from the same seed.
        for (int i = 0; i < 10; ++i) {
            const Point2 seed = gen.point(2.5);
            try {
                const WebCurve a = trace_curve(k, seed, 1, 0.01, kBox);
                const WebCurve b = trace_curve(k, seed, 2, 0.01, kBox);
                const auto at_seed = [&](const WebCurve& c) {
                    const auto it = std::find(c.points.begin(), c.points.end(), seed);
                    REQUIRE(it != c.points.end());
                    return c.tangents[static_cast<size_t>(it - c.points.begin())];
                };
                CHECK(std::abs(dot(at_seed(a), at_seed(b))) < 1e-6);
            } catch (const PreconditionError&) {
            }
        }
    }
}

TEST_CASE("property: build_web is equivariant") {
    const e2::IsometrySE2 g{0.5, -0.25, std::numbers::pi / 2};
    for (const auto& k : {kPolar, kParabolic, kEH, kCartesian}) {
        const WebFigure a = build_web(k, kBox, 5);
        const WebFigure b = build_web(act_on_params(g, k), moved(g, kBox), 5);
        CHECK(b.step == doctest::Approx(a.step));
        REQUIRE(a.markers.size() == b.markers.size());
        for (const auto& m : a.markers) {
            const Point2 gm = act_on_point(g, m);
            double best = 1e300;
            for (const auto& n : b.markers)
                best = std::min(best, distance(gm, n));
            CHECK(best < 1e-9);
        }
        for (const auto& cb : b.curves) {
            double best = 1e300;
            for (const auto& ca : a.curves) {
                if (ca.family != cb.family)
                    continue;
                std::vector<Point2> image;
                for (const auto& p : ca.points)
                    image.push_back(act_on_point(g, p));
                best = std::min(best, hausdorff(image, cb.points));
            }
            CHECK(best < 2 * a.step);
        }
    }
}

TEST_CASE("hausdorff and polyline distance") {
    const std::vector<Point2> a{{0, 0}, {1, 0}}, b{{0, 0.5}, {1, 0.5}};
    CHECK(hausdorff(a, b) == doctest::Approx(0.5));
    CHECK(hausdorff(a, a) == 0.0);
    CHECK(polyline_distance({0.5, 2}, a) == doctest::Approx(2.0));
    CHECK(polyline_distance({-3, 4}, a) == doctest::Approx(5.0));
}

TEST_CASE("svg rendering") {
    WebFigure empty;
    const std::string e = render_svg(empty, 200, 100);
    CHECK(e.rfind("<?xml", 0) == 0);
    CHECK(e.find("<svg") != std::string::npos);
    CHECK(e.find("version=\"1.1\"") != std::string::npos);
    CHECK(e.find("</svg>") != std::string::npos);
    CHECK(count(e, "<path") == 0);
    CHECK(count(e, "<circle") == 0);
    CHECK(count(e, "<line") == 2);
    CHECK_THROWS_AS(render_svg(empty, 0, 100), InputError);

    const WebFigure polar = build_web(kPolar, kBox, 6);
    const std::string p = render_svg(polar, 600, 600);
    CHECK(count(p, "<circle class=\"marker\"") == 1);
    CHECK(count(p, "class=\"family1\"") > 0);
    CHECK(count(p, "class=\"family2\"") > 0);
    CHECK(count(p, " Z\"") > 0);
    CHECK(p.find("<title>polar web; D'1=") != std::string::npos);
    CHECK(p == render_svg(build_web(kPolar, kBox, 6), 600, 600));

    const std::string q = render_svg(build_web(kEH, kBox, 6), 600, 600);
    CHECK(count(q, "<circle class=\"marker\"") == 2);
    CHECK(q.find("elliptic-hyperbolic web") != std::string::npos);
    CHECK(count(q, "stroke-dasharray") == count(q, "class=\"family2\""));
}
