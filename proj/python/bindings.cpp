#include "kt/compat.hpp"
#include "kt/errors.hpp"
#include "kt/invariants.hpp"
#include "kt/symtensor.hpp"
#include "kt/webtrace.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace kt;
using e2::KillingTensorE2;
using e2::Point2;

namespace {

using Beta = std::array<double, 6>;
using Pt = std::array<double, 2>;

KillingTensorE2 kt_of(const Beta& b) { return KillingTensorE2{b}; }
Point2 pt_of(const Pt& p) { return {p[0], p[1]}; }
Pt to_pt(Point2 p) { return {p.x1, p.x2}; }

py::dict tensor_dict(const SymPolyTensor& t) {
    py::dict comps;
    for (const auto& [idx, poly] : t.components()) {
        std::string key;
        for (size_t i = 0; i < idx.size(); ++i)
            key += (i ? "," : "") + std::to_string(idx[i] + 1);
        comps[py::str(key)] = poly.to_string();
    }
    py::dict d;
    d["m"] = t.dimension();
    d["p"] = t.valence();
    d["components"] = comps;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Killing tensors on the Euclidean plane: invariants, webs, compatible potentials.";

    static py::exception<PreconditionError> precondition(m, "PreconditionError", PyExc_ValueError);
    static py::exception<NumericError> numeric(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p)
                std::rethrow_exception(p);
        } catch (const InputError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const PreconditionError& e) {
            precondition(e.what());
        } catch (const NumericError& e) {
            numeric(e.what());
        }
    });

    m.def("npe_dimension", [](int mm, int n, int p) { return npe_dimension(mm, n, p); }, py::arg("m"),
          py::arg("n"), py::arg("p"));
    m.def(
        "solve_gkt",
        [](int mm, int n, int p, std::optional<std::vector<int>> signature) {
            const FlatMetric g = signature ? FlatMetric(*signature) : FlatMetric::euclidean(mm);
            const auto sol = solve_gkt(mm, n, p, g);
            py::list basis;
            for (const auto& t : sol.basis)
                basis.append(tensor_dict(t));
            return py::make_tuple(sol.dimension, basis);
        },
        py::arg("m"), py::arg("n"), py::arg("p"), py::arg("signature") = py::none(),
        "Returns (dimension, basis) of the generalized Killing tensor space.");

    m.def("act_on_params", [](const std::array<double, 3>& g, const Beta& b) {
        return e2::act_on_params({g[0], g[1], g[2]}, kt_of(b)).beta;
    });
    m.def("act_on_point", [](const std::array<double, 3>& g, const Pt& x) {
        return to_pt(e2::act_on_point({g[0], g[1], g[2]}, pt_of(x)));
    });
    m.def("singular_points", [](const Beta& b) {
        std::vector<Pt> out;
        for (const auto& p : e2::singular_points(kt_of(b)))
            out.push_back(to_pt(p));
        return out;
    });

    m.def("fundamental_invariants", [](const Beta& b) {
        const auto d = inv::fundamental_invariants(kt_of(b));
        return py::make_tuple(d.d1, d.d2, d.d3);
    });
    m.def("classify", [](const Beta& b) { return inv::to_string(inv::classify(kt_of(b))); });
    m.def("k_squared", [](const Beta& b) { return inv::k_squared(kt_of(b)); });
    m.def("foci", [](const Beta& b) {
        const auto f = inv::foci(kt_of(b));
        return py::make_tuple(to_pt(f.f1), to_pt(f.f2));
    });
    m.def("joint_invariants", [](const Beta& b1, const Beta& b2) {
        return inv::joint_invariants(kt_of(b1), kt_of(b2)).d;
    });
    m.def("resultant", [](const Beta& b1, const Beta& b2) {
        const auto r = inv::resultant(kt_of(b1), kt_of(b2));
        return py::make_tuple(r.value, r.vanishing);
    });
    m.def("angle_invariant", [](const Beta& b1, const Beta& b2) { return inv::angle_invariant(kt_of(b1), kt_of(b2)); });
    m.def("canonical_form", [](const Beta& b) {
        const auto c = inv::canonical_form(kt_of(b));
        return py::make_tuple(c.tensor.beta, std::array<double, 3>{c.transform.p1, c.transform.p2, c.transform.p3});
    });
    m.def("frame_invariants", [](const Beta& b, const Pt& x) {
        const auto f = inv::frame_invariants(kt_of(b), pt_of(x));
        return py::make_tuple(f.delta1, f.delta2);
    });
    m.def("independence_rank", [](const Beta& b1, const Beta& b2) {
        const auto r = inv::independence_rank(kt_of(b1), kt_of(b2));
        py::dict d;
        d["rank"] = r.rank;
        d["singular_values"] = r.singular_values;
        d["gap_ratio"] = r.gap_ratio;
        return d;
    });

    py::class_<compat::Potential>(m, "Potential")
        .def(py::init([](const std::string& text) { return compat::parse_potential(text); }), py::arg("text"))
        .def("__call__", [](const compat::Potential& v, double x1, double x2) { return v.value({x1, x2}); })
        .def("gradient", [](const compat::Potential& v, double x1, double x2) { return to_pt(v.gradient({x1, x2})); })
        .def("gradient_text", [](const compat::Potential& v) {
            return py::make_tuple(expr::to_string(v.grad(0)), expr::to_string(v.grad(1)));
        })
        .def("__str__", &compat::Potential::text);

    m.def("bd_residual", [](const Beta& b, const compat::Potential& v, const Pt& x) {
        return compat::bd_residual(kt_of(b), v, pt_of(x));
    });
    m.def(
        "compatible_subspace",
        [](const compat::Potential& v, std::uint64_t seed) {
            const auto cs = compat::compatible_subspace(v, seed);
            std::vector<Beta> basis;
            for (const auto& k : cs.basis)
                basis.push_back(k.beta);
            return py::make_tuple(cs.dimension, basis);
        },
        py::arg("potential"), py::arg("seed") = 0);
    m.def("pde_residuals", [](const compat::Potential& v, const Pt& x) { return compat::pde_residuals(v, pt_of(x)); });
    m.def("reconstruct_U", [](const Beta& b, const compat::Potential& v, const Pt& base, const Pt& x) {
        return compat::reconstruct_U(kt_of(b), v, pt_of(base), pt_of(x));
    });
    m.def("verify_kepler_theorem", [](std::uint64_t seed) {
        const auto rep = compat::verify_kepler_theorem(seed);
        py::dict checks;
        for (const auto& c : rep.checks)
            checks[py::str(c.name)] = c.passed;
        py::dict d;
        d["passed"] = rep.passed();
        d["dimension"] = rep.dimension;
        d["perturbed_dimension"] = rep.perturbed_dimension;
        d["checks"] = checks;
        return d;
    }, py::arg("seed") = 0);
    m.def(
        "hamiltonian_flow",
        [](const compat::Potential& v, const Pt& x0, const Pt& p0, double step, double horizon,
           const std::vector<Beta>& integrals, const std::string& precision) {
            std::vector<compat::FirstIntegral> fis;
            for (const auto& b : integrals)
                fis.emplace_back(kt_of(b), v, pt_of(x0));
            compat::FlowOptions fo;
            fo.record_every = 1000;
            if (precision == "double")
                fo.precision = compat::Precision::Double;
            else if (precision != "quad")
                throw InputError("precision must be 'quad' or 'double'");
            const auto rep = compat::hamiltonian_flow(v, pt_of(x0), pt_of(p0), step, horizon, fis, fo);
            py::dict d;
            d["drift_H"] = rep.drift_H;
            d["drift_F"] = rep.drift_F;
            d["steps"] = rep.steps;
            d["aborted"] = rep.aborted;
            d["times"] = rep.times;
            d["states"] = rep.states;
            return d;
        },
        py::arg("potential"), py::arg("x0"), py::arg("p0"), py::arg("step"), py::arg("horizon"),
        py::arg("integrals") = std::vector<Beta>{}, py::arg("precision") = "quad");

    m.def(
        "render_web",
        [](const Beta& b, const std::array<double, 4>& bounds, int density, int width, int height) {
            const auto fig = web::build_web(kt_of(b), {bounds[0], bounds[1], bounds[2], bounds[3]}, density);
            return web::render_svg(fig, width, height);
        },
        py::arg("beta"), py::arg("bounds") = std::array<double, 4>{-3, 3, -3, 3}, py::arg("density") = 8,
        py::arg("width") = 600, py::arg("height") = 600, "SVG text of the coordinate web of beta.");
}
