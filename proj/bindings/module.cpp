#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "blpp/ensemble.hpp"
#include "blpp/estimators.hpp"
#include "blpp/events.hpp"
#include "blpp/geometry.hpp"

namespace py = pybind11;
using namespace blpp;

namespace {
DpOptions make_opts(std::optional<int> corridor) {
    DpOptions opt;
    opt.corridor_halfwidth_cells = corridor;
    return opt;
}
} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Brownian last passage percolation: geodesics, multi-polymers, "
              "line ensembles and rare-event estimators";

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
    py::register_exception<StatisticsError>(m, "StatisticsError", PyExc_RuntimeError);

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init([](double x0, double delta, int num_cells, int anchor_index) {
                 GridSpec g{x0, delta, num_cells, anchor_index};
                 g.validate();
                 return g;
             }),
             py::arg("x0"), py::arg("delta"), py::arg("num_cells"),
             py::arg("anchor_index") = 0)
        .def_readonly("x0", &GridSpec::x0)
        .def_readonly("delta", &GridSpec::delta)
        .def_readonly("num_cells", &GridSpec::num_cells)
        .def_readonly("anchor_index", &GridSpec::anchor_index)
        .def("position", &GridSpec::position);

    py::class_<Environment>(m, "Environment")
        .def_static("generate", &Environment::generate, py::arg("seed"),
                    py::arg("line_min"), py::arg("line_max"), py::arg("grid"))
        .def_static("from_function", &Environment::from_function, py::arg("line_min"),
                    py::arg("line_max"), py::arg("grid"), py::arg("fn"))
        .def("value", &Environment::value, py::arg("line"), py::arg("g"))
        .def("rotated", &Environment::rotated)
        .def_property_readonly("line_min", &Environment::line_min)
        .def_property_readonly("line_max", &Environment::line_max)
        .def_property_readonly("grid", &Environment::grid)
        .def("dumps", [](const Environment& env) {
            std::ostringstream out;
            env.dump(out);
            return py::bytes(out.str());
        })
        .def_static("loads", [](const py::bytes& data) {
            const std::string buf{data};
            std::istringstream in{buf};
            return Environment::load(in);
        });

    py::class_<CompatibleTriple>(m, "CompatibleTriple")
        .def(py::init([](int n, double t1, double t2) {
                 CompatibleTriple t{n, t1, t2};
                 t.validate();
                 return t;
             }),
             py::arg("n"), py::arg("t1"), py::arg("t2"))
        .def_readonly("n", &CompatibleTriple::n)
        .def_readonly("t1", &CompatibleTriple::t1)
        .def_readonly("t2", &CompatibleTriple::t2)
        .def_property_readonly("t12", &CompatibleTriple::t12);

    py::class_<Staircase>(m, "Staircase")
        .def_property_readonly("start",
                               [](const Staircase& s) {
                                   return py::make_tuple(s.start.g, s.start.line);
                               })
        .def_property_readonly(
            "end", [](const Staircase& s) { return py::make_tuple(s.end.g, s.end.line); })
        .def_readonly("jumps", &Staircase::jumps);

    py::enum_<TieRule>(m, "TieRule")
        .value("leftmost", TieRule::leftmost)
        .value("rightmost", TieRule::rightmost);

    m.def(
        "last_passage",
        [](const Environment& env, int from_g, int from_line, int to_g, int to_line,
           std::optional<int> corridor) {
            return last_passage(env, {from_g, from_line}, {to_g, to_line},
                                make_opts(corridor));
        },
        py::arg("env"), py::arg("from_g"), py::arg("from_line"), py::arg("to_g"),
        py::arg("to_line"), py::arg("corridor") = py::none());
    m.def(
        "geodesic",
        [](const Environment& env, int from_g, int from_line, int to_g, int to_line,
           TieRule tie) {
            return geodesic(env, {from_g, from_line}, {to_g, to_line}, tie);
        },
        py::arg("env"), py::arg("from_g"), py::arg("from_line"), py::arg("to_g"),
        py::arg("to_line"), py::arg("tie") = TieRule::leftmost);
    m.def("staircase_energy", &staircase_energy, py::arg("env"), py::arg("staircase"));
    m.def(
        "multi_last_passage",
        [](const Environment& env, const std::vector<int>& xs, int line_i,
           const std::vector<int>& ys, int line_j) {
            return multi_last_passage(env, xs, line_i, ys, line_j);
        },
        py::arg("env"), py::arg("xs"), py::arg("line_i"), py::arg("ys"),
        py::arg("line_j"));
    m.def("brute_force_multi", &brute_force_multi, py::arg("env"), py::arg("xs"),
          py::arg("line_i"), py::arg("ys"), py::arg("line_j"));

    m.def(
        "polymer_weight",
        [](const Environment& env, const CompatibleTriple& triple, double x, double y) {
            SnapReport snap;
            const double w = polymer_weight(env, triple, x, y, &snap);
            return py::make_tuple(w, snap.x_used, snap.y_used);
        },
        py::arg("env"), py::arg("triple"), py::arg("x"), py::arg("y"),
        "Returns (weight, x_used, y_used) with the snapped coordinates");
    m.def(
        "multi_polymer_weight",
        [](const Environment& env, const CompatibleTriple& triple,
           const std::vector<double>& xs, const std::vector<double>& ys) {
            return multi_polymer_weight(env, triple, xs, ys);
        },
        py::arg("env"), py::arg("triple"), py::arg("xs"), py::arg("ys"));
    m.def(
        "polymer_at_time",
        [](const Environment& env, const CompatibleTriple& triple, double x, double y,
           double t, TieRule tie) { return polymer_at_time(env, triple, x, y, t, tie); },
        py::arg("env"), py::arg("triple"), py::arg("x"), py::arg("y"), py::arg("t"),
        py::arg("tie") = TieRule::leftmost);
    m.def("interpolant", &interpolant, py::arg("x"), py::arg("t1"), py::arg("y"),
          py::arg("t2"), py::arg("t"));

    py::class_<LineEnsemble>(m, "LineEnsemble")
        .def_readonly("curve_count", &LineEnsemble::curve_count)
        .def_readonly("domain", &LineEnsemble::domain)
        .def("value", &LineEnsemble::value, py::arg("curve"), py::arg("sample"))
        .def("csv", [](const LineEnsemble& ens) {
            std::ostringstream out;
            write_ensemble_csv(out, ens);
            return out.str();
        });
    m.def(
        "forward_ensemble",
        [](const Environment& env, const CompatibleTriple& triple, double x, int k_max,
           const std::vector<double>& ys) {
            return forward_ensemble(env, triple, x, k_max, ys);
        },
        py::arg("env"), py::arg("triple"), py::arg("x"), py::arg("k_max"),
        py::arg("y_samples"));
    m.def("normalize_ensemble", &normalize_ensemble, py::arg("ensemble"));
    m.def("parabola_q", &parabola_q, py::arg("z"));

    m.def(
        "near_poly",
        [](const Environment& env, const CompatibleTriple& triple, int k, double x,
           double y, double eta) { return near_poly(env, triple, k, x, y, eta); },
        py::arg("env"), py::arg("triple"), py::arg("k"), py::arg("x"), py::arg("y"),
        py::arg("eta"));
    m.def(
        "max_disjoint",
        [](const Environment& env, const CompatibleTriple& triple, double i_lo,
           double i_hi, double j_lo, double j_hi, int k_max, int endpoint_grid) {
            MaxDisjointOptions opt;
            opt.k_max = k_max;
            opt.endpoint_grid = endpoint_grid;
            return max_disjoint(env, triple, {i_lo, i_hi}, {j_lo, j_hi}, opt);
        },
        py::arg("env"), py::arg("triple"), py::arg("i_lo"), py::arg("i_hi"),
        py::arg("j_lo"), py::arg("j_hi"), py::arg("k_max") = 2,
        py::arg("endpoint_grid") = 5);
    m.def(
        "poly_dev_reg",
        [](const Environment& env, const CompatibleTriple& triple, double x, double y,
           double a, double r) { return poly_dev_reg(env, triple, x, y, a, r); },
        py::arg("env"), py::arg("triple"), py::arg("x"), py::arg("y"), py::arg("a"),
        py::arg("r"));
    m.def(
        "fluc_statistic",
        [](const Environment& env, const CompatibleTriple& triple, double x, double y,
           double a) { return fluc_statistic(env, triple, x, y, a); },
        py::arg("env"), py::arg("triple"), py::arg("x"), py::arg("y"), py::arg("a"));

    py::class_<ExponentFit>(m, "ExponentFit")
        .def_readonly("slope", &ExponentFit::slope)
        .def_readonly("intercept", &ExponentFit::intercept)
        .def_readonly("slope_stderr", &ExponentFit::slope_stderr)
        .def_readonly("r_squared", &ExponentFit::r_squared)
        .def_readonly("points_used", &ExponentFit::points_used);
    m.def("fit_exponent", &fit_exponent, py::arg("pairs"), py::arg("log_log") = true);

    m.def("experiment_delta", &experiment_delta, py::arg("n"), py::arg("t12"),
          py::arg("scaled_resolution"));
    m.def("experiment_grid", &experiment_grid, py::arg("n"), py::arg("t1"),
          py::arg("t2"), py::arg("x_lo"), py::arg("x_hi"), py::arg("y_lo"),
          py::arg("y_hi"), py::arg("delta"));
    m.def("transversal_fluctuation_stat",
          [](const Environment& env, int n) { return transversal_fluctuation_stat(env, n); },
          py::arg("env"), py::arg("n"));

#ifdef BLPP_VERSION_INFO
    m.attr("__version__") = BLPP_VERSION_INFO;
#else
    m.attr("__version__") = "dev";
#endif
}
