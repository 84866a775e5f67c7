// bindings.cpp: Python module exposing the state, kernels, maps, controller and scenario runner

#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "bangbang/controller.hpp"
#include "bangbang/errors.hpp"
#include "bangbang/evolution.hpp"
#include "bangbang/kernels.hpp"
#include "bangbang/scenario.hpp"
#include "bangbang/state.hpp"

namespace py = pybind11;
using namespace bangbang;

namespace {

void bind_errors(py::module_& m) {
  static py::exception<Error> base(m, "BangBangError", PyExc_RuntimeError);
  static py::exception<ValidationError> validation(m, "ValidationError", base.ptr());
  static py::exception<DomainError> domain(m, "DomainError", base.ptr());
  static py::exception<QuadratureError> quadrature(m, "QuadratureError", base.ptr());
  static py::exception<NoRootInInterval> no_root(m, "NoRootInInterval", base.ptr());
  static py::exception<NonConvergence> non_conv(m, "NonConvergence", base.ptr());
  static py::exception<NotStabilized> not_stable(m, "NotStabilized", base.ptr());
  static py::exception<IoError> io(m, "IoError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      validation(e.what());
    } catch (const DomainError& e) {
      domain(e.what());
    } catch (const QuadratureError& e) {
      quadrature(e.what());
    } catch (const NoRootInInterval& e) {
      no_root(e.what());
    } catch (const NonConvergence& e) {
      non_conv(e.what());
    } catch (const NotStabilized& e) {
      not_stable(e.what());
    } catch (const IoError& e) {
      io(e.what());
    } catch (const Error& e) {
      base(e.what());
    }
  });
}

py::dict trajectory_columns(const Trajectory& traj) {
  std::vector<int> step;
  std::vector<double> tau, unitary, uncontrolled, controlled, solved, applied;
  std::vector<std::string> label;
  for (const auto& r : traj.rows) {
    step.push_back(r.step);
    tau.push_back(r.tau);
    label.emplace_back(component_label(r.component));
    unitary.push_back(r.unitary);
    uncontrolled.push_back(r.uncontrolled);
    controlled.push_back(r.controlled);
    solved.push_back(r.solved_I);
    applied.push_back(r.applied_I);
  }
  py::dict d;
  d["step"] = step;
  d["tau"] = tau;
  d["component"] = label;
  d["unitary"] = unitary;
  d["uncontrolled"] = uncontrolled;
  d["controlled"] = controlled;
  d["solved_I"] = solved;
  d["applied_I"] = applied;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Open-loop (bang-bang) decoherence control of a spin-boson qubit.";
  bind_errors(m);

  py::enum_<Component>(m, "Component")
      .value("Rho11R", Component::Rho11R)
      .value("Rho11I", Component::Rho11I)
      .value("Rho12R", Component::Rho12R)
      .value("Rho12I", Component::Rho12I)
      .value("Rho21R", Component::Rho21R)
      .value("Rho21I", Component::Rho21I)
      .value("Rho22R", Component::Rho22R)
      .value("Rho22I", Component::Rho22I);
  m.def("component_label", [](Component c) { return std::string(component_label(c)); });

  py::enum_<Regime>(m, "Regime")
      .value("Adiabatic", Regime::Adiabatic)
      .value("Thermal", Regime::Thermal);

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def(py::init<Complex, Complex, Complex, Complex>(), py::arg("rho11"), py::arg("rho12"),
           py::arg("rho21"), py::arg("rho22"))
      .def_static("from_components", &DensityMatrix::from_components)
      .def_property_readonly("rho11", &DensityMatrix::rho11)
      .def_property_readonly("rho12", &DensityMatrix::rho12)
      .def_property_readonly("rho21", &DensityMatrix::rho21)
      .def_property_readonly("rho22", &DensityMatrix::rho22)
      .def("component", &DensityMatrix::component)
      .def("components", &DensityMatrix::components)
      .def("trace", &DensityMatrix::trace)
      .def("__eq__", [](const DensityMatrix& a, const DensityMatrix& b) { return a == b; })
      .def("__repr__", [](const DensityMatrix& r) {
        return "DensityMatrix(" + py::repr(py::cast(r.elements())).cast<std::string>() + ")";
      });
  m.def("from_pure_state", &from_pure_state, py::arg("c1"), py::arg("c2"));

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](Regime regime, double gamma, int n, double omega_c, double beta0,
                       double omega12) {
             ModelParams p{regime, gamma, n, omega_c, beta0, omega12};
             p.validate();
             return p;
           }),
           py::arg("regime") = Regime::Adiabatic, py::arg("gamma") = 0.0, py::arg("n") = 3,
           py::arg("omega_c") = 10.0, py::arg("beta0") = 1.0, py::arg("omega12") = 1.0)
      .def_readwrite("regime", &ModelParams::regime)
      .def_readwrite("gamma", &ModelParams::gamma)
      .def_readwrite("n", &ModelParams::n)
      .def_readwrite("omega_c", &ModelParams::omega_c)
      .def_readwrite("beta0", &ModelParams::beta0)
      .def_readwrite("omega12", &ModelParams::omega12);

  py::class_<QuadratureConfig>(m, "QuadratureConfig")
      .def(py::init<>())
      .def_readwrite("rel_tol", &QuadratureConfig::rel_tol)
      .def_readwrite("abs_tol", &QuadratureConfig::abs_tol)
      .def_readwrite("upper_cut_multiplier", &QuadratureConfig::upper_cut_multiplier)
      .def_readwrite("singular_halfwidth", &QuadratureConfig::singular_halfwidth);

  m.def("spectral_function", &spectral_function, py::arg("omega"), py::arg("n"),
        py::arg("omega_c"));
  m.def("g_adiabatic", &g_adiabatic, py::arg("tau"), py::arg("params"),
        py::arg("quad") = QuadratureConfig{});
  m.def("g_thermal", &g_thermal, py::arg("tau"), py::arg("params"),
        py::arg("quad") = QuadratureConfig{});
  m.def(
      "tabulate_kernel",
      [](const std::vector<double>& taus, const ModelParams& p, const QuadratureConfig& q) {
        return tabulate_kernel(taus, p, q);
      },
      py::arg("taus"), py::arg("params"), py::arg("quad") = QuadratureConfig{});

  m.def("evolve_adiabatic", [](const DensityMatrix& r, double g, double I) {
    return evolve_adiabatic({r, g, I});
  }, py::arg("rho0"), py::arg("g"), py::arg("I"));
  m.def("evolve_thermal", [](const DensityMatrix& r, double g, double I) {
    return evolve_thermal({r, g, I});
  }, py::arg("rho0"), py::arg("g"), py::arg("I"));
  m.def("zero_control_adiabatic", &zero_control_adiabatic, py::arg("rho0"), py::arg("g"));
  m.def("zero_control_thermal", &zero_control_thermal, py::arg("rho0"), py::arg("g"));
  m.def(
      "component_response",
      [](Component idx, const DensityMatrix& r, double g, Regime regime, bool hermitize) {
        ComponentResponse resp(idx, r, g, regime, {hermitize});
        return std::function<double(double)>(resp);
      },
      py::arg("idx"), py::arg("rho0"), py::arg("g"), py::arg("regime"),
      py::arg("hermitize") = false);

  py::class_<EvolutionOptions>(m, "EvolutionOptions")
      .def(py::init<>())
      .def_readwrite("hermitize", &EvolutionOptions::hermitize);

  py::class_<SolverConfig>(m, "SolverConfig")
      .def(py::init<>())
      .def_readwrite("interval_halfwidth", &SolverConfig::interval_halfwidth)
      .def_readwrite("root_tol", &SolverConfig::root_tol)
      .def_readwrite("max_iter", &SolverConfig::max_iter)
      .def_readwrite("scan_intervals", &SolverConfig::scan_intervals);
  m.def("solve_pulse", &solve_pulse, py::arg("idx"), py::arg("rho0"), py::arg("g_since_reset"),
        py::arg("pulse_sum"), py::arg("target"), py::arg("cfg") = SolverConfig{},
        py::arg("regime") = Regime::Adiabatic, py::arg("opts") = EvolutionOptions{});

  py::class_<PulseRecord>(m, "PulseRecord")
      .def(py::init<>())
      .def_readwrite("step", &PulseRecord::step)
      .def_readwrite("component", &PulseRecord::component)
      .def_readwrite("solved_I", &PulseRecord::solved_I)
      .def_readwrite("applied_I", &PulseRecord::applied_I)
      .def_readwrite("root_residual", &PulseRecord::root_residual)
      .def_readwrite("bracket", &PulseRecord::bracket);

  py::class_<StabilizationReport>(m, "StabilizationReport")
      .def_readonly("first_stable_cycle", &StabilizationReport::first_stable_cycle)
      .def_readonly("template_pulses", &StabilizationReport::template_pulses);
  m.def(
      "detect_stabilization",
      [](const std::vector<PulseRecord>& pulses, double tol) {
        return detect_stabilization(pulses, tol);
      },
      py::arg("pulses"), py::arg("tol"));

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_readonly("name", &ScenarioConfig::name)
      .def_readonly("regime", &ScenarioConfig::regime)
      .def_readonly("gamma", &ScenarioConfig::gamma)
      .def_readonly("n", &ScenarioConfig::n)
      .def_readonly("omega_c", &ScenarioConfig::omega_c)
      .def_readonly("beta0", &ScenarioConfig::beta0)
      .def_readonly("omega12", &ScenarioConfig::omega12)
      .def_readonly("step_T", &ScenarioConfig::step_T)
      .def_readonly("num_steps", &ScenarioConfig::num_steps)
      .def_readonly("c1", &ScenarioConfig::c1)
      .def_readonly("c2", &ScenarioConfig::c2)
      .def_property_readonly("noise_delta", [](const ScenarioConfig& c) { return c.noise.delta_I; })
      .def_property_readonly("seed", [](const ScenarioConfig& c) { return c.noise.seed; })
      .def_readonly("hermitize", &ScenarioConfig::hermitize)
      .def_readonly("artifact_choices", &ScenarioConfig::artifact_choices);

  m.def("preset_names", &preset_names);
  m.def("preset", [](const std::string& name) { return preset(name); }, py::arg("name"));
  m.def(
      "load_config",
      [](std::optional<std::filesystem::path> path, const Settings& overrides) {
        return load_config(path, overrides);
      },
      py::arg("path") = py::none(), py::arg("overrides") = Settings{});

  py::class_<ScenarioResult>(m, "ScenarioResult")
      .def_readonly("config", &ScenarioResult::config)
      .def_readonly("pulses", &ScenarioResult::pulses)
      .def_readonly("kernel", &ScenarioResult::kernel)
      .def_readonly("stabilization", &ScenarioResult::stabilization)
      .def_readonly("stabilization_note", &ScenarioResult::stabilization_note)
      .def_readonly("metadata", &ScenarioResult::metadata)
      .def_property_readonly("completed", &ScenarioResult::completed)
      .def_property_readonly("failure",
                             [](const ScenarioResult& r) -> py::object {
                               if (!r.failure) return py::none();
                               py::dict d;
                               d["step"] = r.failure->step;
                               d["kind"] = r.failure->kind;
                               d["message"] = r.failure->message;
                               return d;
                             })
      .def("trajectory", [](const ScenarioResult& r) { return trajectory_columns(r.trajectory); })
      .def("to_csv", [](const ScenarioResult& r) { return to_csv(r); });

  m.def("run_scenario", &run_scenario, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def("export_csv", &export_csv, py::arg("result"), py::arg("path"));
}
