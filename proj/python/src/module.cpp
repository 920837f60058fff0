#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <tuple>

#include "granflow/analysis.hpp"
#include "granflow/config.hpp"
#include "granflow/output.hpp"
#include "granflow/rheology.hpp"
#include "granflow/scenarios.hpp"
#include "granflow/solver.hpp"

namespace py = pybind11;
using namespace granflow;

namespace {

using Tensor = std::tuple<double, double, double>;

SymTensor2 to_tensor(const Tensor& t) { return {std::get<0>(t), std::get<1>(t), std::get<2>(t)}; }
Tensor from_tensor(const SymTensor2& t) { return {t.xx, t.yy, t.xy}; }

SimConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(ConfigError::Kind::parse, e.what());
  }
  return config_from_json(doc);
}

py::array_t<double> to_array(const std::vector<double>& values, int rows, int cols) {
  py::array_t<double> out({rows, cols});
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::dict state_dict(const SimState& s) {
  const Grid& g = s.p.grid();
  py::dict d;
  d["t"] = s.t;
  d["u"] = to_array(s.v.u_values(), g.ny, g.nx + 1);
  d["v"] = to_array(s.v.v_values(), g.ny + 1, g.nx);
  d["p"] = to_array(s.p.values(), g.ny, g.nx);
  d["p_f"] = to_array(s.p_f.values(), g.ny, g.nx);
  return d;
}

py::list checks_list(const std::vector<CheckResult>& checks) {
  py::list out;
  for (const CheckResult& c : checks) {
    py::dict d;
    d["name"] = c.name;
    d["pass"] = c.pass;
    d["value"] = c.value;
    d["threshold"] = c.threshold;
    d["detail"] = c.detail;
    out.append(d);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "granflow core bindings";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SimulationError>(m, "SimulationError", PyExc_RuntimeError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_RuntimeError);

  m.def("yield_stress", &yield_stress, py::arg("p_s"), py::arg("p_f"), py::arg("q_star"));
  m.def(
      "plastic_stress_reg",
      [](const Tensor& D, double tau, std::int64_t n) { return from_tensor(plastic_stress_reg(to_tensor(D), tau, n)); },
      py::arg("D"), py::arg("tau"), py::arg("n"));
  m.def(
      "viscous_stress_activated",
      [](const Tensor& D, double nu, double delta, double q) {
        return from_tensor(viscous_stress_activated(to_tensor(D), nu, delta, q));
      },
      py::arg("D"), py::arg("nu_star"), py::arg("delta_star"), py::arg("q_exponent") = 2.0);
  m.def(
      "bulk_implicit_residual",
      [](const Tensor& Z, const Tensor& D, double tau) { return bulk_implicit_residual(to_tensor(Z), to_tensor(D), tau); },
      py::arg("Z"), py::arg("D"), py::arg("tau"));
  m.def(
      "slip_traction_reg",
      [](std::pair<double, double> v, double s_star, double beta, double gamma, std::int64_t n) {
        const Vec2 z = slip_traction_reg({v.first, v.second}, SlipParams{s_star, beta, gamma}, n);
        return std::make_pair(z.x, z.y);
      },
      py::arg("v_tau"), py::arg("s_star"), py::arg("beta_star"), py::arg("gamma_star"), py::arg("n"));

  m.def("default_config", [] { return config_to_json(SimConfig{}).dump(); });
  m.def(
      "normalize_config", [](const std::string& text) { return config_to_json(parse_config(text)).dump(); },
      py::arg("config_json"));
  m.def(
      "config_hash", [](const std::string& text) { return config_hash(parse_config(text)); }, py::arg("config_json"));

  m.def(
      "simulate",
      [](const std::string& text) {
        const SimConfig cfg = parse_config(text);
        SimState final_state;
        std::string csv;
        std::size_t steps = 0;
        {
          py::gil_scoped_release release;
          EnergyMonitor monitor(cfg);
          final_state = simulate(cfg, {monitor.observer()});
          csv = timeseries_csv(monitor);
          steps = monitor.steps().size();
        }
        py::dict d = state_dict(final_state);
        d["steps"] = steps;
        d["timeseries_csv"] = csv;
        d["config_hash"] = config_hash(cfg);
        return d;
      },
      py::arg("config_json"));

  m.def("scenario_names", [] {
    std::vector<std::string> names;
    for (const Scenario& s : builtin_scenarios()) names.push_back(s.name);
    return names;
  });
  m.def(
      "run_scenario",
      [](const std::string& name) {
        const Scenario s = find_scenario(name);
        std::unique_ptr<ScenarioRun> run;
        {
          py::gil_scoped_release release;
          run = std::make_unique<ScenarioRun>(run_scenario(s));
        }
        py::dict d;
        d["name"] = run->name;
        d["pass"] = run->pass;
        d["metrics"] = run->metrics;
        d["warnings"] = run->warnings;
        d["checks"] = checks_list(run->checks);
        d["steps"] = run->monitor.steps().size();
        d["final"] = state_dict(run->final_state);
        return d;
      },
      py::arg("name"));

  m.def("observed_orders", &observed_orders, py::arg("errors"), py::arg("refinement") = 2.0);
}
