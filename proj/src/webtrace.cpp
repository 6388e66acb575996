#include "kt/webtrace.hpp"

#include "kt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace kt::web {

using e2::distance;
using e2::dot;

std::string to_string(Termination t) {
    switch (t) {
    case Termination::Bounds:
        return "bounds";
    case Termination::SingularPoint:
        return "singular_point";
    case Termination::StepLimit:
        return "step_limit";
    case Termination::Closed:
        return "closed";
    }
    return "unknown";
}

namespace {

std::optional<Point2> field(const KillingTensorE2& k, Point2 x, int family, Point2 ref) {
    e2::EigenFrame f;
    try {
        f = e2::eigenframe(k, x);
    } catch (const PreconditionError&) {
        return std::nullopt;
    }
    Point2 d = family == 1 ? f.e1 : f.e2;
    if (dot(d, ref) < 0.0)
        d = -1.0 * d;
    return d;
}

double nearest(Point2 x, const std::vector<Point2>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& p : pts)
        best = std::min(best, distance(x, p));
    return best;
}

struct Half {
    std::vector<Point2> points; // excludes the seed
    std::vector<Point2> tangents;
    Termination end = Termination::StepLimit;
};

Half march(const KillingTensorE2& k, Point2 seed, Point2 dir0, int family, double h, const Bounds& bounds,
           const std::vector<Point2>& singular, long max_steps, bool detect_closure) {
    Half out;
    Point2 x = seed;
    Point2 d = dir0;
    double arc = 0.0;
    for (long i = 0; i < max_steps; ++i) {
        const auto k1 = field(k, x, family, d);
        const auto k2 = k1 ? field(k, x + (h / 2) * *k1, family, *k1) : std::nullopt;
        const auto k3 = k2 ? field(k, x + (h / 2) * *k2, family, *k2) : std::nullopt;
        const auto k4 = k3 ? field(k, x + h * *k3, family, *k3) : std::nullopt;
        if (!k4) {
            out.end = Termination::SingularPoint;
            return out;
        }
        const Point2 xn = x + (h / 6) * (*k1 + 2.0 * *k2 + 2.0 * *k3 + *k4);
        const auto dn = field(k, xn, family, *k4);
        if (!dn || nearest(xn, singular) < 5 * h) {
            out.end = Termination::SingularPoint;
            return out;
        }
        arc += distance(x, xn);
        if (detect_closure && arc > 10 * h && distance(xn, seed) < 2 * h) {
            const double before = dot(x - seed, dir0);
            const double after = dot(xn - seed, dir0);
            if (before < 0.0 && after >= 0.0) {
                const double t = -before / (after - before);
                const Point2 xc = x + t * (xn - x);
                out.points.push_back(xc);
                out.tangents.push_back(field(k, xc, family, d).value_or(dir0));
                out.end = Termination::Closed;
                return out;
            }
        }
        out.points.push_back(xn);
        out.tangents.push_back(*dn);
        if (!bounds.contains(xn)) {
            out.end = Termination::Bounds;
            return out;
        }
        x = xn;
        d = *dn;
    }
    out.end = Termination::StepLimit;
    return out;
}

} // namespace

WebCurve trace_curve(const KillingTensorE2& k, Point2 seed, int family, double step, const Bounds& bounds,
                     const TraceOptions& options) {
    if (family != 1 && family != 2)
        throw InputError("family must be 1 or 2");
    if (!(step > 0.0) || !std::isfinite(step))
        throw InputError("step must be positive");
    if (!bounds.contains(seed))
        throw PreconditionError("seed lies outside the bounds");
    if (e2::is_trivial(k))
        throw PreconditionError("a multiple of the metric has no web");
    const std::vector<Point2> singular =
        options.singular_points_known ? options.singular_points : e2::singular_points(k);
    if (nearest(seed, singular) < 10 * step)
        throw PreconditionError("seed lies within 10 steps of a singular point");
    const auto d0 = field(k, seed, family, {1.0, 0.0});
    if (!d0)
        throw PreconditionError("eigenvalues coincide at the seed");

    WebCurve c;
    c.family = family;
    c.seed = seed;
    const Half fwd = march(k, seed, *d0, family, step, bounds, singular, options.max_steps, true);
    if (fwd.end == Termination::Closed) {
        c.points.push_back(seed);
        c.tangents.push_back(*d0);
        c.points.insert(c.points.end(), fwd.points.begin(), fwd.points.end());
        c.tangents.insert(c.tangents.end(), fwd.tangents.begin(), fwd.tangents.end());
        c.ends = {Termination::Closed, Termination::Closed};
        c.terminated_by = Termination::Closed;
        return c;
    }
    const Half bwd = march(k, seed, -1.0 * *d0, family, step, bounds, singular, options.max_steps, false);
    for (size_t i = bwd.points.size(); i-- > 0;) {
        c.points.push_back(bwd.points[i]);
        c.tangents.push_back(-1.0 * bwd.tangents[i]);
    }
    c.points.push_back(seed);
    c.tangents.push_back(*d0);
    c.points.insert(c.points.end(), fwd.points.begin(), fwd.points.end());
    c.tangents.insert(c.tangents.end(), fwd.tangents.begin(), fwd.tangents.end());
    c.ends = {bwd.end, fwd.end};
    c.terminated_by = fwd.end;
    return c;
}

double polyline_distance(Point2 p, const std::vector<Point2>& line) {
    if (line.empty())
        return std::numeric_limits<double>::infinity();
    double best = distance(p, line.front());
    for (size_t i = 1; i < line.size(); ++i) {
        const Point2 a = line[i - 1];
        const Point2 ab = line[i] - a;
        const double len2 = dot(ab, ab);
        double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, distance(p, a + t * ab));
    }
    return best;
}

namespace {

std::vector<Point2> probe_points(const std::vector<Point2>& line, int probes) {
    std::vector<double> cum(line.size(), 0.0);
    for (size_t i = 1; i < line.size(); ++i)
        cum[i] = cum[i - 1] + distance(line[i - 1], line[i]);
    std::vector<Point2> out;
    if (line.empty())
        return out;
    const double total = cum.back();
    size_t j = 1;
    for (int s = 0; s < probes; ++s) {
        const double target = probes == 1 ? 0.0 : total * s / (probes - 1);
        while (j < line.size() - 1 && cum[j] < target)
            ++j;
        if (line.size() == 1 || total == 0.0) {
            out.push_back(line.front());
            continue;
        }
        const double seg = cum[j] - cum[j - 1];
        const double t = seg > 0.0 ? std::clamp((target - cum[j - 1]) / seg, 0.0, 1.0) : 0.0;
        out.push_back(line[j - 1] + t * (line[j] - line[j - 1]));
    }
    return out;
}

} // namespace

double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b, int probes) {
    double h = 0.0;
    for (const auto& p : probe_points(a, probes))
        h = std::max(h, polyline_distance(p, b));
    for (const auto& p : probe_points(b, probes))
        h = std::max(h, polyline_distance(p, a));
    return h;
}

namespace {

struct Box {
    double x0, x1, y0, y1;
};

Box box_of(const std::vector<Point2>& pts) {
    Box b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
          std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : pts) {
        b.x0 = std::min(b.x0, p.x1);
        b.x1 = std::max(b.x1, p.x1);
        b.y0 = std::min(b.y0, p.x2);
        b.y1 = std::max(b.y1, p.x2);
    }
    return b;
}

bool boxes_close(const Box& a, const Box& b, double t) {
    return std::abs(a.x0 - b.x0) <= t && std::abs(a.x1 - b.x1) <= t && std::abs(a.y0 - b.y0) <= t &&
           std::abs(a.y1 - b.y1) <= t;
}

} // namespace

WebFigure build_web(const KillingTensorE2& k, const Bounds& bounds, int density, double step) {
    if (density < 1)
        throw InputError("density must be at least 1");
    if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0))
        throw InputError("bounds must have positive extent");
    if (e2::is_trivial(k))
        throw PreconditionError("a multiple of the metric has no web");
    WebFigure fig;
    fig.tensor = k;
    fig.viewport = bounds;
    fig.step = step > 0.0 ? step : std::max(bounds.width(), bounds.height()) / 400.0;
    fig.web_class = inv::classify(k);
    fig.invariants = inv::fundamental_invariants(k);

    TraceOptions opts;
    opts.singular_points = e2::singular_points(k);
    opts.singular_points_known = true;
    if (fig.web_class == inv::WebClass::EllipticHyperbolic) {
        const auto f = inv::foci(k);
        fig.markers = {f.f1, f.f2};
    } else {
        fig.markers = opts.singular_points;
    }

    std::vector<Box> boxes;
    for (int i = 0; i < density; ++i) {
        for (int j = 0; j < density; ++j) {
            const Point2 seed{bounds.xmin + (j + 0.5) * bounds.width() / density,
                              bounds.ymin + (i + 0.5) * bounds.height() / density};
            if (nearest(seed, opts.singular_points) < 10 * fig.step)
                continue;
            for (int family = 1; family <= 2; ++family) {
                WebCurve c;
                try {
                    c = trace_curve(k, seed, family, fig.step, bounds, opts);
                } catch (const PreconditionError&) {
                    continue;
                }
                const Box b = box_of(c.points);
                bool duplicate = false;
                for (size_t m = 0; m < fig.curves.size() && !duplicate; ++m) {
                    if (fig.curves[m].family != family || !boxes_close(boxes[m], b, fig.step))
                        continue;
                    duplicate = hausdorff(fig.curves[m].points, c.points) < fig.step;
                }
                if (!duplicate) {
                    fig.curves.push_back(std::move(c));
                    boxes.push_back(b);
                }
            }
        }
    }
    return fig;
}

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    if (s == "-0.000")
        s = "0.000";
    return s;
}

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string render_svg(const WebFigure& fig, int width_px, int height_px) {
    if (width_px <= 0 || height_px <= 0)
        throw InputError("pixel dimensions must be positive");
    const Bounds& vb = fig.viewport;
    const double sx = width_px / vb.width();
    const double sy = height_px / vb.height();
    auto px = [&](Point2 p) { return num((p.x1 - vb.xmin) * sx) + "," + num((vb.ymax - p.x2) * sy); };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width_px) +
           "\" height=\"" + std::to_string(height_px) + "\" viewBox=\"0 0 " + std::to_string(width_px) + " " +
           std::to_string(height_px) + "\">\n";
    out += "<title>" + inv::to_string(fig.web_class) + " web; D'1=" + sci(fig.invariants.d1) +
           " D'2=" + sci(fig.invariants.d2) + " D'3=" + sci(fig.invariants.d3) + "</title>\n";
    out += "<desc>family 1 (solid): integral curves of the eigenvector of the smaller eigenvalue; "
           "family 2 (dashed): the larger eigenvalue</desc>\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width_px) + "\" height=\"" +
           std::to_string(height_px) + "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";
    if (vb.ymin <= 0.0 && vb.ymax >= 0.0)
        out += "<line x1=\"0\" y1=\"" + num(vb.ymax * sy) + "\" x2=\"" + std::to_string(width_px) + "\" y2=\"" +
               num(vb.ymax * sy) + "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
    if (vb.xmin <= 0.0 && vb.xmax >= 0.0)
        out += "<line x1=\"" + num(-vb.xmin * sx) + "\" y1=\"0\" x2=\"" + num(-vb.xmin * sx) + "\" y2=\"" +
               std::to_string(height_px) + "\" stroke=\"#bbbbbb\" stroke-width=\"0.5\"/>\n";
    for (const auto& c : fig.curves) {
        if (c.points.empty())
            continue;
        out += "<path class=\"family" + std::to_string(c.family) + "\" d=\"M" + px(c.points.front());
        for (size_t i = 1; i < c.points.size(); ++i)
            out += " L" + px(c.points[i]);
        if (c.terminated_by == Termination::Closed)
            out += " Z";
        out += "\" fill=\"none\" stroke=\"";
        out += c.family == 1 ? "#1f4e9c\" stroke-width=\"1\"/>\n"
                             : "#b03a2e\" stroke-width=\"1\" stroke-dasharray=\"4,3\"/>\n";
    }
    for (const auto& m : fig.markers) {
        if (!vb.contains(m))
            continue;
        const std::string at = px(m);
        const auto comma = at.find(',');
        out += "<circle class=\"marker\" cx=\"" + at.substr(0, comma) + "\" cy=\"" + at.substr(comma + 1) +
               "\" r=\"4\" fill=\"black\"/>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace kt::web
