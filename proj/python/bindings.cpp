// pybind11 surface over the core operations: exact-identity suites, the
// mode-level propagator, initial data and full simulation runs.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "soler2d/errors.hpp"
#include "soler2d/report.hpp"

namespace py = pybind11;
using namespace soler2d;

namespace {

std::array<std::array<cplx, 2>, 2> as_rows(const Matrix2& m) {
    return {{{m.m00, m.m01}, {m.m10, m.m11}}};
}

RunConfig config_from_kwargs(const py::kwargs& kw) {
    RunConfig cfg;
    for (const auto& item : kw) {
        const std::string key = py::cast<std::string>(item.first);
        const py::handle v = item.second;
        if (key == "grid_n") cfg.grid_n = py::cast<int>(v);
        else if (key == "grid_l") cfg.grid_l = py::cast<double>(v);
        else if (key == "dt") cfg.dt = py::cast<double>(v);
        else if (key == "t_end") cfg.t_end = py::cast<double>(v);
        else if (key == "snapshot_stride") cfg.snapshot_stride = py::cast<int>(v);
        else if (key == "mass") cfg.mass = py::cast<double>(v);
        else if (key == "epsilon") cfg.epsilon = py::cast<double>(v);
        else if (key == "direction") cfg.direction = py::cast<std::string>(v);
        else if (key == "sobolev_n") cfg.sobolev_n = py::cast<int>(v);
        else if (key == "output_dir") cfg.output_dir = py::cast<std::string>(v);
        else if (key == "companion") cfg.companion = py::cast<bool>(v);
        else if (key == "linear_only") cfg.linear_only = py::cast<bool>(v);
        else if (key == "seed") cfg.seed = py::cast<unsigned>(v);
        else throw py::key_error("unknown config key: " + key);
    }
    return cfg;
}

py::dict summary_to_dict(const RunSummary& sm) {
    py::dict d;
    d["trivial_run"] = sm.trivial_run;
    d["charge_drift"] = sm.charge_drift;
    d["support_leak"] = sm.support_leak;
    d["decay_exponent"] = sm.decay_exponent;
    d["decay_monitor_early"] = sm.decay_monitor_early;
    d["decay_monitor_late"] = sm.decay_monitor_late;
    d["improved_monitor_early"] = sm.improved_monitor_early;
    d["improved_monitor_late"] = sm.improved_monitor_late;
    d["energy_identity_max_residual"] = sm.energy_identity_max_residual;
    d["energy_bound_min_slack"] = sm.energy_bound_min_slack;
    d["energy_bound_ok"] = sm.energy_bound_ok;
    d["energy_variation"] = sm.energy_variation;
    d["scatter_exponent_high"] = sm.scatter_exponent_high;
    d["scatter_refinement_delta"] = sm.scatter_refinement_delta;
    d["scatter_tail_bound"] = sm.scatter_tail_bound;
    d["scatter_sqrt_t_low_first"] = sm.scatter_sqrt_t_low_first;
    d["scatter_sqrt_t_low_last"] = sm.scatter_sqrt_t_low_last;
    d["ghost_total"] = sm.ghost_total;
    d["ghost_tail"] = sm.ghost_tail;
    d["companion_residual"] = sm.companion_residual;
    return d;
}

}  // namespace

PYBIND11_MODULE(_soler2d, m) {
    m.doc() = "2d cubic Dirac (Soler) pseudo-spectral simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<BlowupError>(m, "BlowupError", PyExc_RuntimeError);

    m.def("verify_algebra",
          [](unsigned seed) {
              py::dict d;
              for (const auto& [name, residual] : verify_algebra(seed))
                  d[py::str(name)] = residual;
              return d;
          },
          py::arg("seed") = 20260823u,
          "max residual of each exact-identity suite");

    m.def("soler_density",
          [](cplx a, cplx b) { return soler_density({a, b}); },
          py::arg("a"), py::arg("b"));

    m.def("dirac_exponential",
          [](double xi1, double xi2, double mass, double t) {
              return as_rows(dirac_exponential({xi1, xi2}, mass, t));
          },
          py::arg("xi1"), py::arg("xi2"), py::arg("mass"), py::arg("t"),
          "mode-level propagator exp(i t M(xi)) as 2x2 rows");

    m.def("fit_exponent",
          [](const std::vector<std::pair<double, double>>& series, double t_min) {
              const ExponentFit f = fit_exponent(series, t_min);
              return py::make_tuple(f.slope, f.intercept, f.residual);
          },
          py::arg("series"), py::arg("t_min") = 10.0,
          "log-log least squares: (slope, intercept, rms residual)");

    m.def("initial_data_norms",
          [](int n, double l, double eps, const std::string& direction, double mass) {
              RunConfig cfg;
              cfg.grid_n = n;
              cfg.grid_l = l;
              cfg.epsilon = eps;
              cfg.direction = direction;
              cfg.mass = mass;
              const SpinorField f =
                  make_initial_data(cfg.grid(), eps, cfg.direction_spinor(), mass);
              return py::make_tuple(l2_norm(f), sobolev_norm(f, 2));
          },
          py::arg("n"), py::arg("l"), py::arg("epsilon"),
          py::arg("direction") = "e1", py::arg("mass") = 1.0,
          "(L2, H2) norms of the bump initial data");

    m.def("run_simulation",
          [](const py::kwargs& kw) {
              return summary_to_dict(run_simulation(config_from_kwargs(kw)).summary);
          },
          "full run; keyword args mirror the CLI config keys");

    m.def("run_and_write",
          [](const py::kwargs& kw) {
              return summary_to_dict(run_and_write(config_from_kwargs(kw)));
          },
          "full run plus CSV/JSON/snapshot artifacts in output_dir");
}
