#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "gcurve/analysis.hpp"
#include "gcurve/config.hpp"
#include "gcurve/control.hpp"
#include "gcurve/run.hpp"

namespace py = pybind11;
using namespace gcurve;

namespace {

py::array_t<double> matrix(const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.size(), n = rows.empty() ? 0 : rows.front().size();
  py::array_t<double> a({m, n});
  auto v = a.mutable_unchecked<2>();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) v(i, j) = rows[i][j];
  }
  return a;
}

template <class F>
py::dict pack(const std::vector<F>& snaps) {
  std::vector<double> t;
  std::vector<std::vector<double>> u;
  for (const auto& s : snaps) {
    t.push_back(s.time);
    u.push_back(s.values);
  }
  py::dict d;
  d["times"] = py::array_t<double>(py::ssize_t(t.size()), t.data());
  d["values"] = matrix(u);
  return d;
}

py::dict evolve(const std::string& text) {
  const auto c = parse_config(text);
  const auto& nm = c.numerics;
  py::gil_scoped_release release;
  if (c.kind == ProblemKind::Periodic) {
    const auto p = build_periodic(c.periodic);
    const auto snaps = periodic::evolve(p, curvature_params(c), nm.t_max, nm.snapshot_interval(),
                                        {}, nm.dt.value_or(0.0));
    py::gil_scoped_acquire acquire;
    auto d = pack(snaps);
    d["N"] = p.grid.N;
    d["dim"] = p.grid.dim;
    return d;
  }
  const auto p = build_radial(c.radial);
  const auto snaps = radial::evolve_radial(p, nm.t_max, nm.snapshot_interval(), {},
                                           radial_params(c), nm.dt.value_or(0.0));
  py::gil_scoped_acquire acquire;
  auto d = pack(snaps);
  std::vector<double> r(p.grid.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = p.grid.r(i);
  d["r"] = py::array_t<double>(py::ssize_t(r.size()), r.data());
  return d;
}

py::dict aubry(const std::string& text) {
  const auto c = parse_config(text);
  const AubrySet A = c.kind == ProblemKind::Periodic ? aubry_set(build_periodic(c.periodic))
                                                      : aubry_set(build_radial(c.radial));
  py::dict d;
  d["nodes"] = A.nodes;
  d["radii"] = A.radii;
  d["S0"] = A.S0;
  d["S1"] = A.S1;
  d["R0"] = A.R0;
  d["R1"] = A.R1;
  return d;
}

std::string verify(const std::string& text) {
  const auto c = parse_config(text);
  py::gil_scoped_release release;
  return analysis::to_json(verify_suite(c, nullptr)).dump();
}

py::dict run_mode(const std::string& mode, const std::string& text, const std::string& out_dir) {
  RunOptions o;
  o.mode = parse_mode(mode);
  if (!out_dir.empty()) o.output_dir = out_dir;
  o.quiet = true;
  o.config_text = text;
  const auto c = parse_config(text);
  RunOutcome r;
  {
    py::gil_scoped_release release;
    r = run(c, o);
  }
  py::dict d;
  d["exit_code"] = r.exit_code;
  d["message"] = r.message;
  d["artifacts"] = r.artifacts;
  return d;
}

RadialProblem radial_problem(int n, const std::string& F) {
  RadialConfig c;
  c.n = n;
  c.F = ScalarSpec::expr(F);
  return build_radial(c);
}

}  // namespace

PYBIND11_MODULE(_gcurve, m) {
  m.doc() = "Cutoff level-set curvature G-equation solvers";
  m.attr("__version__") = GCURVE_VERSION;

  static py::exception<Error> error(m, "GcurveError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object kind = py::str(std::string(to_string(e.kind())));
      py::object exc = py::reinterpret_borrow<py::object>(error.ptr())(e.what());
      exc.attr("kind") = kind;
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("fnv1a_hex", &fnv1a_hex, py::arg("data"));
  m.def("evolve", &evolve, py::arg("config_text"),
        "Snapshots of the configured problem: times, values (one row per snapshot) and the grid.");
  m.def("aubry_set", &aubry, py::arg("config_text"));
  m.def("verify", &verify, py::arg("config_text"), "Verification report as a JSON string.");
  m.def("run", &run_mode, py::arg("mode"), py::arg("config_text"), py::arg("out_dir") = "",
        "Runs a CLI mode; returns exit_code, message and artifacts.");
  m.def(
      "velocity_cone",
      [](double r, int n) {
        const auto k = control::velocity_cone(r, n);
        return py::make_tuple(k.v_min, k.v_max);
      },
      py::arg("r"), py::arg("n"));
  m.def(
      "travel_cost",
      [](int n, const std::string& F, double r_from, double r_to) {
        return control::travel_cost(radial_problem(n, F), r_from, r_to);
      },
      py::arg("n"), py::arg("F"), py::arg("r_from"), py::arg("r_to"));
  m.attr("INF") = kInf;
}
