#include "kt/cli.hpp"

#include "kt/compat.hpp"
#include "kt/errors.hpp"
#include "kt/invariants.hpp"
#include "kt/symtensor.hpp"
#include "kt/webtrace.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace kt::cli {

using json = nlohmann::json;
using e2::KillingTensorE2;
using e2::KillingTensorE2Exact;
using e2::Point2;

std::string convention_ledger() {
    return "kt 1.0.0\n"
           "bracket: [A,B] = p Sym(A d B) - q Sym(B d A), Sym averaging over index positions; "
           "[K,g] = -2 Sym(grad K) for constant g\n"
           "action: act_on_params(g, K) is the pushforward, K'(g x) = R K(x) R^T; left action, "
           "(g o h)(x) = g(h(x)); isometry (p1, p2, p3) is x -> R(p3) x + (p1, p2)\n"
           "symmetric product: K = K11 d1^2 + 2 K12 d1 d2 + K22 d2^2, matrix entries [[K11, K12], [K12, K22]]\n"
           "first integral: F = K^ij p_i p_j + U with dU = 2 K dV\n"
           "foci: f1 is the lexicographically larger focus; web family 1 follows the eigenvector of the "
           "smaller eigenvalue\n";
}

namespace {

struct Config {
    double tol_exact = 1e-12;
    double tol_float = 1e-9;
    std::uint64_t seed = 0;
    double fd_step = 1e-5;
    std::string format = "text";
};

struct Raw {
    std::string in_file;
    std::map<std::string, std::string> flags;
    json file = json::object();

    std::optional<std::string> get(const std::string& key) const {
        auto it = flags.find(key);
        if (it != flags.end() && !it->second.empty())
            return it->second;
        if (!file.contains(key))
            return std::nullopt;
        const json& v = file.at(key);
        auto scalar = [](const json& s) { return s.is_string() ? s.get<std::string>() : s.dump(); };
        if (v.is_array()) {
            std::string joined;
            for (size_t i = 0; i < v.size(); ++i) {
                if (v[i].is_array() || v[i].is_object())
                    throw InputError("field '" + key + "' must be a flat array");
                joined += (i ? "," : "") + scalar(v[i]);
            }
            return joined;
        }
        if (v.is_object())
            throw InputError("field '" + key + "' must not be an object");
        return scalar(v);
    }

    std::string need(const std::string& key) const {
        auto v = get(key);
        if (!v)
            throw InputError("missing --" + key);
        return *v;
    }
};

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != ' ') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<Rational> rationals(const std::string& text, size_t count, const std::string& what) {
    const auto parts = split(text);
    if (parts.size() != count)
        throw InputError(what + " needs " + std::to_string(count) + " comma-separated values, got " +
                         std::to_string(parts.size()));
    std::vector<Rational> out;
    for (const auto& p : parts) {
        try {
            out.push_back(parse_rational(p));
        } catch (const std::exception&) {
            throw InputError("malformed number '" + p + "' in " + what);
        }
    }
    return out;
}

std::vector<double> doubles(const std::string& text, size_t count, const std::string& what) {
    std::vector<double> out;
    for (const auto& q : rationals(text, count, what)) {
        const double d = q.get_d();
        if (!std::isfinite(d))
            throw InputError("value out of range in " + what);
        out.push_back(d);
    }
    return out;
}

struct Tensor {
    KillingTensorE2 k;
    std::optional<KillingTensorE2Exact> exact; // set when a literal was written as p/q
};

Tensor tensor(const Raw& raw, const std::string& key) {
    const std::string text = raw.need(key);
    const auto q = rationals(text, 6, "--" + key);
    Tensor t;
    KillingTensorE2Exact ex;
    for (size_t i = 0; i < 6; ++i) {
        ex.beta[i] = q[i];
        t.k.beta[i] = q[i].get_d();
    }
    if (text.find('/') != std::string::npos)
        t.exact = ex;
    return t;
}

Point2 point(const Raw& raw, const std::string& key) {
    const auto v = doubles(raw.need(key), 2, "--" + key);
    return {v[0], v[1]};
}

json to_json(Point2 p) { return json::array({p.x1 + 0.0, p.x2 + 0.0}); }

json to_json(const KillingTensorE2& k) {
    json b = json::array();
    for (double v : k.beta)
        b.push_back(v + 0.0);
    return b;
}

json to_json(const SymPolyTensor& t) {
    json comps = json::object();
    for (const auto& [idx, poly] : t.components()) {
        std::string key;
        for (size_t i = 0; i < idx.size(); ++i)
            key += (i ? "," : "") + std::to_string(idx[i] + 1);
        comps[key] = poly.to_string();
    }
    return {{"m", t.dimension()}, {"p", t.valence()}, {"components", comps}};
}

json curve_json(const web::WebCurve& c) {
    json pts = json::array();
    for (const auto& p : c.points)
        pts.push_back(to_json(p));
    return {{"family", c.family},
            {"seed", to_json(c.seed)},
            {"terminated_by", web::to_string(c.terminated_by)},
            {"ends", {web::to_string(c.ends[0]), web::to_string(c.ends[1])}},
            {"points", pts}};
}

void emit(std::ostream& out, const Config& cfg, const json& obj, const std::optional<json>& scalar = std::nullopt) {
    if (cfg.format == "text" && scalar) {
        if (scalar->is_string())
            out << scalar->get<std::string>() << "\n";
        else
            out << scalar->dump() << "\n";
        return;
    }
    out << obj.dump() << "\n";
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const InputError*>(&e))
        return 2;
    if (dynamic_cast<const PreconditionError*>(&e))
        return 3;
    if (dynamic_cast<const NumericError*>(&e))
        return 4;
    return 4;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Killing tensors on the Euclidean plane: invariants, webs and compatible potentials", "kt"};
    app.require_subcommand(1);
    app.fallthrough();
    Config cfg;
    Raw raw;
    bool version = false;
    app.add_flag("--version", version, "Print the convention ledger");
    app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text", "svg"}));
    app.add_option("--tol-exact", cfg.tol_exact, "Zero tolerance for invariants")->check(CLI::PositiveNumber);
    app.add_option("--tol-float", cfg.tol_float, "Tolerance for float decisions")->check(CLI::PositiveNumber);
    app.add_option("--fd-step", cfg.fd_step, "Finite-difference step")->check(CLI::PositiveNumber);
    std::optional<std::uint64_t> seed_flag;
    app.add_option("--seed", seed_flag, "Random seed (KT_SEED also sets it)");
    app.add_option("--in", raw.in_file, "JSON file supplying inputs");

    auto opt = [&raw](CLI::App* sub, const std::string& name, const std::string& help) {
        sub->add_option("--" + name, raw.flags[name], help);
    };
    auto beta_opts = [&](CLI::App* sub, bool pair) {
        opt(sub, "beta", "b1,...,b6 (decimal or p/q)");
        if (pair)
            opt(sub, "alpha", "second tensor a1,...,a6");
    };

    auto* c_dim = app.add_subcommand("dim", "Generalized Killing tensor dimension formula");
    auto* c_gkt = app.add_subcommand("gkt", "Solve the generalized Killing tensor equation");
    for (auto* s : {c_dim, c_gkt}) {
        opt(s, "m", "dimension");
        opt(s, "n", "order");
        opt(s, "p", "valence");
    }
    opt(c_gkt, "signature", "metric signature, e.g. 1,-1");
    opt(c_gkt, "degree-bound", "polynomial degree of the ansatz");

    auto* c_inv = app.add_subcommand("invariants", "Fundamental invariants");
    auto* c_cls = app.add_subcommand("classify", "Web class");
    auto* c_k2 = app.add_subcommand("k2", "Squared half focal distance");
    auto* c_foci = app.add_subcommand("foci", "Foci of an elliptic-hyperbolic web");
    auto* c_can = app.add_subcommand("canonical", "Canonical form");
    for (auto* s : {c_inv, c_cls, c_k2, c_foci, c_can})
        beta_opts(s, false);
    auto* c_joint = app.add_subcommand("joint", "Joint invariants of a pair");
    auto* c_res = app.add_subcommand("resultant", "Resultant of a pair");
    auto* c_ang = app.add_subcommand("angle", "Angle invariant of a pair");
    auto* c_rank = app.add_subcommand("rank", "Jacobian rank of the joint invariants");
    for (auto* s : {c_joint, c_res, c_ang, c_rank})
        beta_opts(s, true);
    auto* c_frame = app.add_subcommand("frame", "Frame invariants at a point");
    beta_opts(c_frame, false);
    opt(c_frame, "x", "point x1,x2");

    auto* c_bd = app.add_subcommand("bd", "Bertrand-Darboux residual");
    beta_opts(c_bd, false);
    opt(c_bd, "expr", "potential");
    opt(c_bd, "x", "point x1,x2");
    auto* c_cb = app.add_subcommand("compat-basis", "Killing tensors compatible with a potential");
    opt(c_cb, "expr", "potential");
    opt(c_cb, "samples", "x1,y1,x2,y2,... (at least 8 points)");
    auto* c_kv = app.add_subcommand("kepler-verify", "Check the Kepler characterization");
    auto* c_pde = app.add_subcommand("pde-check", "Residuals of the four potential PDEs");
    opt(c_pde, "expr", "potential");
    opt(c_pde, "x", "point x1,x2");
    auto* c_int = app.add_subcommand("integrate", "RK4 flow with conservation report");
    opt(c_int, "expr", "potential");
    opt(c_int, "x0", "initial position");
    opt(c_int, "p0", "initial momentum");
    opt(c_int, "step", "step size");
    opt(c_int, "horizon", "final time");
    opt(c_int, "record-every", "keep every n-th state");
    opt(c_int, "precision", "quad or double");
    std::vector<std::string> integrals;
    c_int->add_option("--integral", integrals, "b1,...,b6 of a first integral (repeatable)");
    bool unchecked = false;
    c_int->add_flag("--unchecked", unchecked, "Accept integrals whose tensor is not compatible");
    auto* c_web = app.add_subcommand("web", "Trace the coordinate web and render it");
    beta_opts(c_web, false);
    opt(c_web, "bounds", "xmin,xmax,ymin,ymax");
    opt(c_web, "density", "seed grid size");
    opt(c_web, "step", "trace step");
    opt(c_web, "width", "pixels");
    opt(c_web, "height", "pixels");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (std::find(args.begin(), args.end(), "--version") != args.end()) {
        out << convention_ledger();
        return 0;
    }
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (seed_flag) {
            cfg.seed = *seed_flag;
        } else if (const char* env = std::getenv("KT_SEED")) {
            try {
                cfg.seed = std::stoull(env);
            } catch (const std::exception&) {
                throw InputError("KT_SEED must be a non-negative integer");
            }
        }
        if (!raw.in_file.empty()) {
            std::ifstream f(raw.in_file);
            if (!f)
                throw InputError("cannot open " + raw.in_file);
            try {
                raw.file = json::parse(f);
            } catch (const json::exception& e) {
                throw InputError(std::string("bad JSON in ") + raw.in_file + ": " + e.what());
            }
            if (!raw.file.is_object())
                throw InputError("input JSON must be an object");
        }
        auto integer = [&raw](const std::string& key, std::optional<long> fallback = std::nullopt) -> long {
            auto v = raw.get(key);
            if (!v) {
                if (fallback)
                    return *fallback;
                throw InputError("missing --" + key);
            }
            try {
                size_t used = 0;
                const long n = std::stol(*v, &used);
                if (used != v->size())
                    throw std::invalid_argument(*v);
                return n;
            } catch (const std::exception&) {
                throw InputError("--" + key + " must be an integer, got '" + *v + "'");
            }
        };
        auto real = [&raw](const std::string& key, std::optional<double> fallback = std::nullopt) -> double {
            auto v = raw.get(key);
            if (!v) {
                if (fallback)
                    return *fallback;
                throw InputError("missing --" + key);
            }
            return doubles(*v, 1, "--" + key)[0];
        };

        if (c_dim->parsed()) {
            const long m = integer("m"), n = integer("n"), p = integer("p");
            if (m < 1 || n < 0 || p < 0)
                throw InputError("need m >= 1, n >= 0, p >= 0");
            const auto d = npe_dimension(static_cast<int>(m), static_cast<int>(n), static_cast<int>(p));
            emit(out, cfg, {{"m", m}, {"n", n}, {"p", p}, {"dimension", d}}, json(d));
        } else if (c_gkt->parsed()) {
            const long m = integer("m"), n = integer("n"), p = integer("p");
            if (m < 1 || n < 0 || p < 0)
                throw InputError("need m >= 1, n >= 0, p >= 0");
            std::vector<int> sig(static_cast<size_t>(m), 1);
            if (auto s = raw.get("signature")) {
                const auto parts = split(*s);
                if (parts.size() != static_cast<size_t>(m))
                    throw InputError("--signature needs m entries");
                for (size_t i = 0; i < parts.size(); ++i) {
                    if (parts[i] == "1" || parts[i] == "+1" || parts[i] == "+")
                        sig[i] = 1;
                    else if (parts[i] == "-1" || parts[i] == "-")
                        sig[i] = -1;
                    else
                        throw InputError("signature entries must be +1 or -1");
                }
            }
            std::optional<int> bound;
            if (raw.get("degree-bound"))
                bound = static_cast<int>(integer("degree-bound"));
            const auto sol = solve_gkt(static_cast<int>(m), static_cast<int>(n), static_cast<int>(p),
                                       FlatMetric(sig), bound);
            json basis = json::array();
            for (const auto& t : sol.basis)
                basis.push_back(to_json(t));
            emit(out, cfg, {{"dimension", sol.dimension}, {"degree_bound", sol.degree_bound}, {"basis", basis}});
        } else if (c_inv->parsed()) {
            const Tensor t = tensor(raw, "beta");
            if (t.exact) {
                const auto d = inv::fundamental_invariants(*t.exact);
                emit(out, cfg,
                     {{"d1", d.d1.get_str()}, {"d2", d.d2.get_str()}, {"d3", d.d3.get_str()}, {"exact", true}});
            } else {
                const auto d = inv::fundamental_invariants(t.k);
                emit(out, cfg, {{"d1", d.d1}, {"d2", d.d2}, {"d3", d.d3}});
            }
        } else if (c_cls->parsed()) {
            const Tensor t = tensor(raw, "beta");
            const auto c = t.exact ? inv::classify(*t.exact) : inv::classify(t.k, cfg.tol_exact);
            emit(out, cfg, {{"class", inv::to_string(c)}}, json(inv::to_string(c)));
        } else if (c_k2->parsed()) {
            const double v = inv::k_squared(tensor(raw, "beta").k, cfg.tol_exact);
            emit(out, cfg, {{"k2", v}}, json(v));
        } else if (c_foci->parsed()) {
            const auto f = inv::foci(tensor(raw, "beta").k, cfg.tol_exact);
            emit(out, cfg, {{"f1", to_json(f.f1)}, {"f2", to_json(f.f2)}});
        } else if (c_can->parsed()) {
            const auto c = inv::canonical_form(tensor(raw, "beta").k, cfg.tol_exact);
            emit(out, cfg,
                 {{"beta", to_json(c.tensor)},
                  {"p", {c.transform.p1 + 0.0, c.transform.p2 + 0.0, c.transform.p3 + 0.0}}});
        } else if (c_joint->parsed()) {
            const auto j = inv::joint_invariants(tensor(raw, "beta").k, tensor(raw, "alpha").k, cfg.tol_exact);
            json d = json::array();
            for (double v : j.d)
                d.push_back(v + 0.0);
            emit(out, cfg, {{"d", d}});
        } else if (c_res->parsed()) {
            const auto r = inv::resultant(tensor(raw, "beta").k, tensor(raw, "alpha").k, cfg.tol_float);
            emit(out, cfg, {{"value", r.value + 0.0}, {"vanishing", r.vanishing}});
        } else if (c_ang->parsed()) {
            const double v = inv::angle_invariant(tensor(raw, "beta").k, tensor(raw, "alpha").k, cfg.tol_exact);
            emit(out, cfg, {{"cos", v}}, json(v));
        } else if (c_rank->parsed()) {
            const auto r = inv::independence_rank(tensor(raw, "beta").k, tensor(raw, "alpha").k, cfg.fd_step);
            emit(out, cfg,
                 {{"rank", r.rank}, {"singular_values", r.singular_values}, {"gap_ratio", r.gap_ratio}});
        } else if (c_frame->parsed()) {
            const auto f = inv::frame_invariants(tensor(raw, "beta").k, point(raw, "x"), cfg.fd_step);
            emit(out, cfg, {{"delta1", f.delta1}, {"delta2", f.delta2}});
        } else if (c_bd->parsed()) {
            const auto v = compat::parse_potential(raw.need("expr"));
            const double r = compat::bd_residual(tensor(raw, "beta").k, v, point(raw, "x"));
            emit(out, cfg, {{"residual", r + 0.0}}, json(r + 0.0));
        } else if (c_cb->parsed()) {
            const auto v = compat::parse_potential(raw.need("expr"));
            std::vector<Point2> samples = compat::default_samples();
            if (auto s = raw.get("samples")) {
                const auto parts = split(*s);
                if (parts.size() % 2 != 0)
                    throw InputError("--samples needs an even number of coordinates");
                const auto xs = doubles(*s, parts.size(), "--samples");
                samples.clear();
                for (size_t i = 0; i < xs.size(); i += 2)
                    samples.push_back({xs[i], xs[i + 1]});
            }
            const auto cs = compat::compatible_subspace(v, samples, cfg.seed);
            json basis = json::array();
            for (const auto& b : cs.basis)
                basis.push_back({{"beta", to_json(b)}});
            emit(out, cfg,
                 {{"dimension", cs.dimension},
                  {"basis", basis},
                  {"singular_values", cs.singular_values},
                  {"gap_ratio", std::isfinite(cs.gap_ratio) ? json(cs.gap_ratio) : json(nullptr)}});
        } else if (c_kv->parsed()) {
            const auto rep = compat::verify_kepler_theorem(cfg.seed);
            json checks = json::array();
            for (const auto& c : rep.checks)
                checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
            emit(out, cfg,
                 {{"passed", rep.passed()},
                  {"dimension", rep.dimension},
                  {"perturbed_dimension", rep.perturbed_dimension},
                  {"checks", checks}});
            if (!rep.passed())
                return 4;
        } else if (c_pde->parsed()) {
            const auto v = compat::parse_potential(raw.need("expr"));
            const auto r = compat::pde_residuals(v, point(raw, "x"));
            emit(out, cfg, {{"residuals", r}});
        } else if (c_int->parsed()) {
            const auto v = compat::parse_potential(raw.need("expr"));
            const Point2 x0 = point(raw, "x0");
            const Point2 p0 = point(raw, "p0");
            compat::FlowOptions fo;
            fo.record_every = static_cast<int>(integer("record-every", 100));
            const std::string prec = raw.get("precision").value_or("quad");
            if (prec != "quad" && prec != "double")
                throw InputError("--precision must be quad or double");
            fo.precision = prec == "quad" ? compat::Precision::Quad : compat::Precision::Double;
            std::vector<compat::FirstIntegral> fis;
            std::vector<std::string> specs = integrals;
            if (specs.empty() && raw.file.contains("integrals"))
                for (const auto& b : raw.file.at("integrals")) {
                    std::string joined;
                    for (size_t i = 0; i < b.size(); ++i)
                        joined += (i ? "," : "") + (b[i].is_string() ? b[i].get<std::string>() : b[i].dump());
                    specs.push_back(joined);
                }
            for (const auto& s : specs) {
                const auto b = doubles(s, 6, "--integral");
                KillingTensorE2 k;
                std::copy(b.begin(), b.end(), k.beta.begin());
                fis.push_back(unchecked ? compat::FirstIntegral::unchecked(k, v, x0)
                                        : compat::FirstIntegral(k, v, x0));
            }
            const auto rep = compat::hamiltonian_flow(v, x0, p0, real("step"), real("horizon"), fis, fo);
            emit(out, cfg,
                 {{"times", rep.times},
                  {"states", rep.states},
                  {"drift_H", rep.drift_H},
                  {"drift_F", rep.drift_F},
                  {"steps", rep.steps},
                  {"aborted", rep.aborted},
                  {"abort_reason", rep.abort_reason}});
            if (rep.aborted) {
                err << "error: " << rep.abort_reason << "\n";
                return 4;
            }
        } else if (c_web->parsed()) {
            const KillingTensorE2 k = tensor(raw, "beta").k;
            web::Bounds b{-3, 3, -3, 3};
            if (auto s = raw.get("bounds")) {
                const auto v = doubles(*s, 4, "--bounds");
                b = {v[0], v[1], v[2], v[3]};
            }
            const auto fig = web::build_web(k, b, static_cast<int>(integer("density", 8)), real("step", 0.0));
            if (cfg.format == "json") {
                json curves = json::array();
                for (const auto& c : fig.curves)
                    curves.push_back(curve_json(c));
                json markers = json::array();
                for (const auto& m : fig.markers)
                    markers.push_back(to_json(m));
                out << json{{"beta", to_json(fig.tensor)},
                            {"class", inv::to_string(fig.web_class)},
                            {"invariants", {fig.invariants.d1, fig.invariants.d2, fig.invariants.d3}},
                            {"viewport", {b.xmin, b.xmax, b.ymin, b.ymax}},
                            {"step", fig.step},
                            {"markers", markers},
                            {"curves", curves}}
                           .dump()
                    << "\n";
            } else {
                out << web::render_svg(fig, static_cast<int>(integer("width", 600)),
                                       static_cast<int>(integer("height", 600)));
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}

} // namespace kt::cli
