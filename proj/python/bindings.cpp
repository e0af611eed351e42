// Python bindings.  Valuations cross the boundary as literals
// ("edge:(E1,E2) t=1/2"), rationals as fractions.Fraction and quadratic
// numbers as "a+b*sqrt(d)" strings.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "valdyn/io.hpp"

namespace py = pybind11;
using namespace valdyn;

namespace {

py::object fraction(const Rat& x) {
    static py::object cls = py::module_::import("fractions").attr("Fraction");
    return cls(to_string(x));
}

py::list fractions(const std::vector<Rat>& xs) {
    py::list out;
    for (const auto& x : xs) out.append(fraction(x));
    return out;
}

py::list ints(const std::vector<Int>& xs) {
    py::list out;
    for (const auto& x : xs) out.append(py::int_(py::reinterpret_steal<py::object>(
        PyLong_FromString(x.str().c_str(), nullptr, 10))));
    return out;
}

py::object integer(const Int& x) { return ints({x})[0]; }

py::dict point(const QMValuation& v, const DualGraph& g) {
    py::dict d;
    d["literal"] = to_literal(v, g);
    d["t"] = fraction(monomial_parameter(v, g));
    return d;
}

py::dict fixed_dict(const FixedSet& fx, const DualGraph& g) {
    py::dict d;
    d["kind"] = to_string(fx.kind);
    if (fx.point) d["point"] = point(*fx.point, g);
    if (fx.t) d["t"] = fx.t->str();
    if (!fx.slope_minpoly.empty()) d["slope_minpoly"] = ints(fx.slope_minpoly);
    if (fx.rational) d["rational"] = *fx.rational;
    if (fx.beta) d["beta"] = *fx.beta;
    return d;
}

py::dict degree_dict(const QuadraticInteger& q) {
    py::dict d;
    d["minpoly"] = ints(q.minpoly);
    d["approx"] = q.approx;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Valuation spaces of normal surface singularities and germ dynamics";

    static py::exception<Error> error(m, "ValdynError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
            exc.attr("kind") = e.kind();
            PyErr_SetObject(error.ptr(), exc.ptr());
        }
    });

    py::class_<DualGraph>(m, "Graph")
        .def_static("load", [](const std::string& path) { return load_graph(path); }, py::arg("path"))
        .def_property_readonly("ids", [](const DualGraph& g) {
            std::vector<std::string> ids;
            for (const auto& p : g.primes()) ids.push_back(p.id);
            return ids;
        })
        .def("__len__", &DualGraph::size)
        .def("dual_basis", [](const DualGraph& g) {
            py::list rows;
            const Mat& inv = g.dual_basis();
            for (std::size_t i = 0; i < g.size(); ++i) rows.append(fractions(inv.column(static_cast<int>(i))));
            return rows;
        }, "Columns of the dual basis, one list per prime.")
        .def("discrepancy", [](const DualGraph& g) {
            DiscrepancyTable t = canonical_coeffs(g);
            py::dict d;
            d["k"] = fractions(t.k);
            d["a_div"] = fractions(t.a_div);
            d["a_norm"] = fractions(t.a_norm);
            return d;
        })
        .def("classify", [](const DualGraph& g) {
            Classification c = classify_singularity(g);
            py::dict d;
            d["class"] = to_string(c.cls);
            d["type"] = c.type;
            return d;
        })
        .def("skewness", [](const DualGraph& g, const std::string& nu) { return fraction(skewness(parse_valuation(nu, g), g)); })
        .def("angular_distance", [](const DualGraph& g, const std::string& nu, const std::string& mu) {
            return fraction(angular_distance(parse_valuation(nu, g), parse_valuation(mu, g), g).exact_exp);
        }, "exp of the angular distance, exactly")
        .def("leq", [](const DualGraph& g, const std::string& mu, const std::string& nu) {
            return leq(parse_valuation(mu, g), parse_valuation(nu, g), g);
        })
        .def("to_dot", [](const DualGraph& g) { return to_dot(g); });

    py::class_<SkeletonMap>(m, "Germ")
        .def_static("load", [](const std::string& path) { return load_germ(path); }, py::arg("path"))
        .def_property_readonly("graph", &SkeletonMap::graph)
        .def_property_readonly("finite", &SkeletonMap::finite)
        .def("apply", [](const SkeletonMap& f, const std::string& nu) {
            Step st = apply(parse_valuation(nu, f.graph()), f);
            py::dict d;
            d["image"] = point(st.image, f.graph());
            d["rate"] = fraction(st.rate);
            return d;
        })
        .def("rates", [](const SkeletonMap& f, const std::string& nu, int n) {
            std::vector<Rat> out;
            for (const auto& p : orbit(parse_valuation(nu, f.graph()), f, n)) out.push_back(p.rate);
            return fractions(out);
        }, py::arg("nu"), py::arg("n"))
        .def("fixed_set", [](const SkeletonMap& f) { return fixed_dict(find_fixed_set(f), f.graph()); })
        .def("degree", [](const SkeletonMap& f) { return degree_dict(dynamical_degree(f)); });

    m.def("detect_recursion", [](const std::vector<std::string>& seq) -> py::object {
        std::vector<Rat> xs;
        for (const auto& s : seq) xs.push_back(parse_rat(s));
        auto r = detect_recursion(xs);
        if (!r) return py::none();
        py::dict d;
        d["m"] = r->m;
        d["a"] = integer(r->a);
        d["b"] = integer(r->b);
        d["n0"] = r->n0;
        return d;
    }, "Linear recursion c[n+2m] = a c[n+m] + b c[n] in a sequence of rationals given as strings.");

    py::class_<CuspData>(m, "Cusp")
        .def(py::init([](const std::vector<int>& cycle, int s) { return make_cusp(cycle, s); }), py::arg("cycle"),
             py::arg("s") = 1)
        .def_readonly("cycle", &CuspData::cycle)
        .def_readonly("s", &CuspData::s)
        .def_property_readonly("omega", [](const CuspData& c) { return c.omega.str(); })
        .def_property_readonly("eps_omega", [](const CuspData& c) { return c.eps_omega.str(); })
        .def("vertex", [](const CuspData& c, long n) { return vertex_sequence(c, n).str(); })
        .def("validate", [](const CuspData& c, const std::string& alpha) {
            AlphaCheck a = validate_alpha(QuadElem::parse(alpha, c.d()), c);
            py::dict d;
            d["ok"] = a.ok;
            d["degree"] = integer(a.degree);
            d["reason"] = a.reason;
            return d;
        })
        .def("rotation", [](const CuspData& c, const std::string& alpha) {
            Rotation r = rotation_number(QuadElem::parse(alpha, c.d()), c);
            py::dict d;
            d["rational"] = r.rational;
            d["beta"] = r.beta;
            if (r.rational) d["fraction"] = fraction(Rat(r.p, r.q));
            return d;
        })
        .def("induce", [](const CuspData& c, const std::string& alpha) {
            return induced_skeleton_map(QuadElem::parse(alpha, c.d()), c);
        })
        .def("dual_graph", [](const CuspData& c) { return cusp_dual_graph(c); });
}
