#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "accrete/baseline.hpp"
#include "accrete/beam.hpp"
#include "accrete/compliance.hpp"
#include "accrete/config.hpp"
#include "accrete/errors.hpp"
#include "accrete/growth.hpp"
#include "accrete/output.hpp"
#include "accrete/step_solver.hpp"

namespace py = pybind11;
using namespace accrete;

namespace {

py::dict record_dict(const StepRecord& r) {
  py::dict d;
  d["step"] = r.step;
  d["h"] = r.h.vec();
  d["mass"] = r.mass;
  d["mass_target"] = r.mass_target;
  d["compliance"] = r.compliance;
  d["objective"] = r.objective;
  d["lambda"] = r.lambda;
  d["mu"] = r.mu;
  d["growth_fraction"] = r.growth_fraction;
  d["max_increment"] = r.max_increment;
  d["kkt_residual"] = r.kkt_residual;
  d["dual_infeasibility"] = r.dual_infeasibility;
  d["iterations"] = r.iterations;
  d["newton_iterations"] = r.newton_iterations;
  d["degenerate"] = r.degenerate;
  return d;
}

py::dict baseline_dict(const BaselineSolution& s) {
  py::dict d;
  d["h"] = s.h.vec();
  d["lambda"] = s.lambda;
  d["growth_set"] = s.growth_set;
  d["x_hat"] = s.x_hat ? py::cast(*s.x_hat) : py::none();
  d["mass"] = s.mass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_accrete, m) {
  m.doc() = "Incremental growth of prestrained cantilever beams (C++ core)";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<DegenerateSectionError>(m, "DegenerateSectionError", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const GrowthError& e) {
      PyErr_SetString(PyExc_RuntimeError, e.what());
    }
  });

  py::class_<BeamConfig>(m, "BeamConfig")
      .def(py::init([](double length, double young_modulus, int n_cells) {
             BeamConfig c{length, young_modulus, n_cells};
             c.validate();
             return c;
           }),
           py::arg("length") = 20.0, py::arg("young_modulus") = 1e5, py::arg("n_cells") = 200)
      .def_readwrite("length", &BeamConfig::length)
      .def_readwrite("young_modulus", &BeamConfig::young_modulus)
      .def_readwrite("n_cells", &BeamConfig::n_cells)
      .def_property_readonly("cell_width", &BeamConfig::cell_width)
      .def("cell_centers", &BeamConfig::cell_centers)
      .def("__repr__", [](const BeamConfig& c) {
        return "BeamConfig(length=" + format_number(c.length) + ", young_modulus=" +
               format_number(c.young_modulus) + ", n_cells=" + std::to_string(c.n_cells) + ")";
      });

  py::enum_<LoadKind>(m, "LoadKind")
      .value("UNIFORM", LoadKind::UniformLoad)
      .value("MOMENT", LoadKind::ConstantMoment);

  py::class_<LoadCase>(m, "LoadCase")
      .def(py::init([](LoadKind kind, double value) { return LoadCase{kind, value}; }),
           py::arg("kind"), py::arg("value"))
      .def_readwrite("kind", &LoadCase::kind)
      .def_readwrite("value", &LoadCase::value);

  m.def("bending_moment", &bending_moment, py::arg("load"), py::arg("config"), py::arg("x"));
  m.def("moments_at_centers", &moments_at_centers, py::arg("load"), py::arg("config"));

  m.def(
      "solve_section",
      [](const std::vector<double>& heights, const std::vector<std::pair<double, double>>& prestrains,
         double moment, double young_modulus) {
        std::vector<PrestrainPair> pre;
        for (auto [e, k] : prestrains) pre.push_back({e, k});
        const auto s = solve_section(heights, pre, moment, young_modulus);
        return std::make_pair(s.eps, s.kappa);
      },
      py::arg("heights"), py::arg("prestrains"), py::arg("moment"), py::arg("young_modulus"),
      "Strain and curvature (eps, kappa) of a layered section; heights = [h_0, ..., h_i].");

  m.def("density_baseline", &density_baseline, py::arg("h"), py::arg("moment"), py::arg("young_modulus"));
  m.def("density_prestrain", &density_prestrain, py::arg("h"), py::arg("h0"), py::arg("moment"),
        py::arg("young_modulus"), py::arg("eps_p"));
  m.def("density_precurv_first", &density_precurv_first, py::arg("h"), py::arg("h0"),
        py::arg("moment"), py::arg("young_modulus"), py::arg("kappa_p"));

  m.def("f_value", &f_value, py::arg("eta"), py::arg("hbar"));
  m.def("f_first", &f_first, py::arg("eta"), py::arg("hbar"));
  m.def("f_second", &f_second, py::arg("eta"), py::arg("hbar"));
  m.def("g_value", &g_value, py::arg("mu"), py::arg("hbar"));
  m.def("g_first", &g_first, py::arg("mu"), py::arg("hbar"));
  m.def("g_second", &g_second, py::arg("mu"), py::arg("hbar"));
  m.def(
      "f_concavity_interval",
      [](double eta) {
        const auto iv = f_concavity_interval(eta);
        return std::make_pair(iv.lo, iv.hi);
      },
      py::arg("eta"));
  m.def(
      "convex_envelope",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size()) throw InputError("x and y differ in length");
        std::vector<Point> pts(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) pts[i] = {x[i], y[i]};
        std::vector<double> out;
        for (const auto& p : convex_envelope_1d(pts)) out.push_back(p.y);
        return out;
      },
      py::arg("x"), py::arg("y"), "Lower convex envelope evaluated at every x.");

  m.def(
      "project_mass_lb",
      [](const std::vector<double>& z, const std::vector<double>& lb, double mass, double delta,
         bool inequality) {
        return project_mass_lb(z, lb, mass, delta, inequality ? MassMode::Inequality : MassMode::Equality);
      },
      py::arg("z"), py::arg("lb"), py::arg("mass"), py::arg("delta"), py::arg("inequality") = false);

  m.def(
      "solve_baseline_first",
      [](const BeamConfig& c, double p, double h0, double m1) {
        return baseline_dict(solve_baseline_first(c, p, h0, m1));
      },
      py::arg("config"), py::arg("p"), py::arg("h0"), py::arg("m1"));
  m.def(
      "solve_baseline_step",
      [](const BeamConfig& c, const LoadCase& load, const std::vector<double>& h_prev, double m) {
        return baseline_dict(solve_baseline_step(c, load, HeightField(h_prev), m));
      },
      py::arg("config"), py::arg("load"), py::arg("h_prev"), py::arg("m"));

  m.def(
      "parse_config", [](const std::string& text) { return dump_config(parse_config(text)); },
      py::arg("text"), "Validate a configuration and return its canonical form.");

  m.def(
      "run_growth",
      [](const std::string& config_text, const std::string& output_dir) {
        const RunConfig cfg = parse_config(config_text);
        GrowthTrace trace;
        {
          py::gil_scoped_release release;
          trace = run_growth(cfg.to_growth_setup());
        }
        if (!output_dir.empty()) write_trace(trace, output_dir, &cfg);
        py::dict out;
        out["x_center"] = trace.config.cell_centers();
        out["initial"] = trace.initial.vec();
        out["initial_compliance"] = trace.initial_compliance;
        py::list steps;
        for (const auto& r : trace.steps) steps.append(record_dict(r));
        out["steps"] = steps;
        return out;
      },
      py::arg("config_text"), py::arg("output_dir") = std::string(),
      "Run the growth problem described by a configuration text; optionally write the trace.");
}
