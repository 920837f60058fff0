#pragma once

// Built-in scenarios with their oracles:
//   quiescent-plug      yield-dominated, no flow expected
//   fluidization-front  pore pressure above lithostatic in part of the box, flow localizes there
//   newtonian-mms       manufactured Navier-slip vortex, analytic oracle
//   heat-decay          frozen velocity, separable pore-pressure decay
//   slip-threshold      Newtonian bulk with stick-slip walls

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "granflow/analysis.hpp"
#include "granflow/config.hpp"
#include "granflow/solver.hpp"

namespace granflow {

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ScenarioRun;

struct Scenario {
  std::string name;
  std::string description;
  SimConfig cfg;
  std::function<VectorField(const SimConfig&)> initial_v;
  std::function<ScalarField(const SimConfig&)> initial_pf;
  /// Optional per-step probe recording scenario metrics.
  std::function<void(const SimState& prev, const SimState& next, const StepInfo& info, ScenarioRun& run)> probe;
  /// Oracle assertions evaluated after the run.
  std::function<std::vector<CheckResult>(const ScenarioRun& run)> oracle;
};

struct ScenarioRun {
  std::string name;
  SimConfig cfg;
  SimState initial;
  SimState final_state;
  EnergyMonitor monitor;
  std::vector<double> velocity_linf;  // per step
  std::map<std::string, double> metrics;
  std::vector<std::string> warnings;
  std::vector<CheckResult> checks;
  bool pass = false;

  explicit ScenarioRun(const SimConfig& c) : cfg(c), monitor(c) {}

  /// metrics[key] = max(metrics[key], value)
  void record_max(const std::string& key, double value);
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& scenario, const std::string& what)
      : std::runtime_error("scenario " + scenario + ": " + what), scenario_(scenario) {}
  const std::string& scenario() const { return scenario_; }

 private:
  std::string scenario_;
};

std::vector<Scenario> builtin_scenarios();

/// Throws std::out_of_range for an unknown name.
Scenario find_scenario(const std::string& name);

/// Runs simulate with the energy monitor attached, then evaluates the oracle.
/// Every scenario also gets the divergence/boundary-flux and dissipation-sign checks.
ScenarioRun run_scenario(const Scenario& s, const std::vector<Observer>& extra_observers = {});

/// Runs scenarios on up to `threads` workers; results keep the input order.
/// The first failure (in input order) is rethrown after all workers finish.
std::vector<ScenarioRun> run_scenarios(const std::vector<Scenario>& list, int threads);

/// GRANFLOW_THREADS if set to a positive integer, else the hardware concurrency.
int thread_count_from_env();

/// Steady manufactured vortex on an n x n unit square, dt = 0.25 h / max|v|.
SimConfig newtonian_mms_config(int n, std::int64_t steps);

/// Amplitude of the manufactured vortex and its maximum speed.
inline constexpr double kMmsAmplitude = 1.0;
double mms_max_speed(const SimConfig& cfg);

}  // namespace granflow
