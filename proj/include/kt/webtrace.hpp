#pragma once

#include "kt/e2core.hpp"
#include "kt/invariants.hpp"

#include <array>
#include <string>
#include <vector>

namespace kt::web {

using e2::KillingTensorE2;
using e2::Point2;

struct Bounds {
    double xmin = -1.0;
    double xmax = 1.0;
    double ymin = -1.0;
    double ymax = 1.0;

    bool contains(Point2 p, double margin = 0.0) const {
        return p.x1 >= xmin - margin && p.x1 <= xmax + margin && p.x2 >= ymin - margin && p.x2 <= ymax + margin;
    }
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
};

enum class Termination { Bounds, SingularPoint, StepLimit, Closed };
std::string to_string(Termination t);

/// Integral curve of one eigenvector field. Family 1 follows the eigenvector
/// of the smaller eigenvalue, family 2 the larger one.
struct WebCurve {
    int family = 1;
    Point2 seed;
    std::vector<Point2> points;
    std::vector<Point2> tangents;                  // unit field direction at each point
    std::array<Termination, 2> ends{};             // {backward, forward}
    Termination terminated_by = Termination::Bounds; // Closed, else the forward end
};

struct TraceOptions {
    long max_steps = 100000;
    /// Singular points to stay away from; computed from K when empty.
    std::vector<Point2> singular_points;
    bool singular_points_known = false;
};

/// RK4 along the unit eigenvector field from `seed`, in both directions.
/// Stops at the bounds, within 5 step of a singular point, after max_steps,
/// or when the curve closes up on the seed. Throws PreconditionError when the
/// seed is outside the bounds or within 10 step of a singular point.
WebCurve trace_curve(const KillingTensorE2& k, Point2 seed, int family, double step, const Bounds& bounds,
                     const TraceOptions& options = {});

struct WebFigure {
    KillingTensorE2 tensor;
    std::vector<WebCurve> curves;
    std::vector<Point2> markers;
    Bounds viewport;
    double step = 0.0;
    inv::WebClass web_class = inv::WebClass::Trivial;
    inv::InvariantTriple invariants;
};

/// Seeds a density x density grid of cell centers, traces both families and
/// drops curves within `step` (Hausdorff) of an earlier one. Markers are the
/// foci for elliptic-hyperbolic webs and the singular points otherwise.
/// step <= 0 selects max(width, height) / 400.
WebFigure build_web(const KillingTensorE2& k, const Bounds& bounds, int density, double step = 0.0);

/// Symmetric Hausdorff distance estimated with `probes` points spread by arc
/// length along each polyline.
double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b, int probes = 32);

/// Distance from p to a polyline.
double polyline_distance(Point2 p, const std::vector<Point2>& line);

std::string render_svg(const WebFigure& fig, int width_px, int height_px);

} // namespace kt::web
