#include "granflow/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <optional>
#include <thread>

#include "granflow/discretization.hpp"

namespace granflow {

void ScenarioRun::record_max(const std::string& key, double value) {
  auto [it, inserted] = metrics.try_emplace(key, value);
  if (!inserted) it->second = std::max(it->second, value);
}

namespace {

CheckResult at_most(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value <= threshold, value, threshold, std::move(detail)};
}

CheckResult at_least(std::string name, double value, double threshold, std::string detail = {}) {
  return {std::move(name), value >= threshold, value, threshold, std::move(detail)};
}

double metric(const ScenarioRun& run, const std::string& key) {
  const auto it = run.metrics.find(key);
  return it == run.metrics.end() ? 0.0 : it->second;
}

ScalarField yield_at(const SimConfig& cfg, const ScalarField& p_f, double t) {
  ScalarField tau(cfg.grid);
  for (int j = 0; j < cfg.grid.ny; ++j)
    for (int i = 0; i < cfg.grid.nx; ++i)
      tau(i, j) = yield_stress(lithostatic_pressure(cfg, t, cfg.grid.xc(i), cfg.grid.yc(j)), p_f(i, j),
                               cfg.rheology.q_star);
  return tau;
}

Scenario quiescent_plug() {
  Scenario s;
  s.name = "quiescent-plug";
  s.description = "tau = 1 everywhere, rotational forcing of amplitude 1e-6: the material must not flow";
  SimConfig& c = s.cfg;
  c.name = s.name;
  c.grid = Grid(32, 32, 1.0, 1.0);
  c.rheology.q_star = 1.0;
  c.rheology.reg_n = 100;
  c.lithostatic.value = 1.0;
  c.initial_pore_pressure.kind = InitialPorePressureSpec::Kind::constant;
  c.initial_pore_pressure.value = 0.0;
  c.body_force.kind = BodyForceSpec::Kind::vortex;
  c.body_force.amplitude = 1e-6;
  c.time.dt = 0.01;
  c.time.t_end = 5.0;
  s.oracle = [](const ScenarioRun& run) {
    const double vmax = *std::max_element(run.velocity_linf.begin(), run.velocity_linf.end());
    return std::vector<CheckResult>{at_most("quiescence", vmax, 1e-8, "max over steps of ||v||_inf")};
  };
  return s;
}

Scenario fluidization_front() {
  Scenario s;
  s.name = "fluidization-front";
  s.description = "p_f = 2 > p_s = 1 on the left half (tau = 0), p_f = 0 on the right (tau = 1); vortex forcing";
  SimConfig& c = s.cfg;
  c.name = s.name;
  c.grid = Grid(32, 32, 1.0, 1.0);
  c.rheology.q_star = 1.0;
  c.rheology.reg_n = 10000;
  c.physics.permeability = 1e-3;
  c.lithostatic.value = 1.0;
  c.initial_pore_pressure.kind = InitialPorePressureSpec::Kind::patch;
  c.initial_pore_pressure.value = 0.0;
  c.initial_pore_pressure.inside = 2.0;
  c.initial_pore_pressure.x0 = 0.0;
  c.initial_pore_pressure.x1 = 0.5;
  c.initial_pore_pressure.y0 = 0.0;
  c.initial_pore_pressure.y1 = 1.0;
  c.body_force.kind = BodyForceSpec::Kind::vortex;
  c.body_force.amplitude = 0.5;
  c.time.dt = 0.01;
  c.time.t_end = 0.5;
  s.probe = [](const SimState& prev, const SimState& next, const StepInfo&, ScenarioRun& run) {
    const SimConfig& cfg = run.cfg;
    const ScalarField tau = yield_at(cfg, prev.p_f, next.t);
    const StressState st = evaluate_stress_state(next.v, tau, cfg.rheology, cfg.slip);
    const double n = static_cast<double>(cfg.rheology.reg_n);
    const double tol = 1e-6;
    double branch_violation = 0.0;
    double d_fluid = 0.0, d_solid = 0.0;
    int n_fluid = 0, n_solid = 0;
    for (int j = 0; j < cfg.grid.ny; ++j)
      for (int i = 0; i < cfg.grid.nx; ++i) {
        const SymTensor2& d = st.D(i, j);
        const double s_norm = norm(st.Z(i, j) + st.V(i, j));
        const double t = tau(i, j);
        const double dn = norm(d);
        if (t > 0.0 && s_norm < t - tol) {
          // Regularized plastic branch: |D| <= |S| / (n (tau - |S|)), which tends to D = 0.
          const double bound = s_norm / (n * (t - s_norm));
          branch_violation = std::max(branch_violation, dn - bound * (1.0 + 1e-9) - 1e-14);
        }
        if (t == 0.0) {
          d_fluid += dn;
          ++n_fluid;
        } else if (t >= 0.5) {
          d_solid += dn;
          ++n_solid;
        }
      }
    run.record_max("branch_violation", branch_violation);
    if (n_fluid > 0 && n_solid > 0 && d_fluid > 0.0)
      run.metrics["localization_ratio"] = (d_solid / n_solid) / (d_fluid / n_fluid);
  };
  s.oracle = [](const ScenarioRun& run) {
    return std::vector<CheckResult>{
        at_most("plastic-branch", metric(run, "branch_violation"), 0.0,
                "cells with |S| < tau - 1e-6 satisfy |D| <= |S|/(n(tau - |S|))"),
        at_most("localization", metric(run, "localization_ratio"), 0.1,
                "mean |D| where tau >= 0.5 over mean |D| where tau = 0"),
    };
  };
  return s;
}

Scenario newtonian_mms() {
  Scenario s;
  s.name = "newtonian-mms";
  s.description = "steady manufactured vortex with Navier slip, tau = 0, delta = 0";
  s.cfg = newtonian_mms_config(64, 200);
  s.oracle = [](const ScenarioRun& run) {
    const SimConfig cfg = run.cfg;
    const auto exact = [&](double, double x, double y) { return mms_velocity(cfg, kMmsAmplitude, x, y); };
    const double err_fine = mms_error(run.final_state, exact, NormKind::L2);
    const SimConfig coarse = newtonian_mms_config(cfg.grid.nx / 2, cfg.step_count() / 2);
    const double err_coarse = mms_error(simulate(coarse), exact, NormKind::L2);
    const double order = observed_orders({err_coarse, err_fine}).front();
    return std::vector<CheckResult>{
        at_most("energy-slack", run.monitor.max_slack_ratio(), 0.05, "max per-step slack / total dissipation"),
        at_least("mms-order", order, 1.9, "L2 velocity error order against the half-resolution run"),
    };
  };
  return s;
}

Scenario heat_decay() {
  Scenario s;
  s.name = "heat-decay";
  s.description = "v = 0, p_f0 = cos(pi x): L2 amplitude decays as exp(-(pi/lx)^2 t)";
  SimConfig& c = s.cfg;
  c.name = s.name;
  c.grid = Grid(64, 64, 1.0, 1.0);
  c.lithostatic.value = 1.0;
  c.initial_pore_pressure.kind = InitialPorePressureSpec::Kind::cosine;
  c.initial_pore_pressure.value = 0.0;
  c.initial_pore_pressure.amplitude = 1.0;
  c.time.dt = 1e-3;
  c.time.t_end = 0.102;
  s.probe = [](const SimState& prev, const SimState& next, const StepInfo&, ScenarioRun& run) {
    using std::numbers::pi;
    const double k = pi / run.cfg.grid.lx;
    const double ratio = next.p_f.l2_norm() / (run.initial.p_f.l2_norm() * std::exp(-k * k * next.t));
    run.record_max("decay_deviation", std::abs(ratio - 1.0));
    run.record_max("velocity", next.v.linf_norm());
    run.record_max("delta2_over_dt", std::abs(energy_report(prev, next, run.cfg).pf_delta2) / run.cfg.time.dt);
  };
  s.oracle = [](const ScenarioRun& run) {
    return std::vector<CheckResult>{
        at_most("decay-rate", metric(run, "decay_deviation"), 0.02, "| ||p_f(t)|| / (||p_f0|| e^{-k^2 t}) - 1 |"),
        at_most("frozen-velocity", metric(run, "velocity"), 0.0),
    };
  };
  return s;
}

Scenario slip_threshold() {
  Scenario s;
  s.name = "slip-threshold";
  s.description = "Newtonian bulk, vortex forcing, stick-slip walls with s* between corner and mid-wall traction";
  SimConfig& c = s.cfg;
  c.name = s.name;
  c.grid = Grid(32, 32, 1.0, 1.0);
  c.rheology.q_star = 0.0;
  c.rheology.reg_n = 1000000000000000;
  c.slip.s_star = 0.2;
  c.slip.beta_star = 0.0;
  c.slip.gamma_star = 1.0;
  c.body_force.kind = BodyForceSpec::Kind::vortex;
  c.body_force.amplitude = 1.0;
  c.time.dt = 0.01;
  c.time.t_end = 1.0;
  s.probe = [](const SimState& prev, const SimState& next, const StepInfo&, ScenarioRun& run) {
    const SimConfig& cfg = run.cfg;
    const StressState st = evaluate_stress_state(next.v, yield_at(cfg, prev.p_f, next.t), cfg.rheology, cfg.slip);
    double violation = 0.0;
    int stick = 0, slipping = 0;
    for (const WallNode& w : st.walls) {
      if (w.traction < cfg.slip.s_star - 1e-6) {
        violation = std::max(violation, w.slip_speed);
        ++stick;
      } else {
        ++slipping;
      }
    }
    run.record_max("stick_speed", violation);
    run.metrics["stick_nodes"] = stick;
    run.metrics["slip_nodes"] = slipping;
  };
  s.oracle = [](const ScenarioRun& run) {
    return std::vector<CheckResult>{
        at_most("stick-branch", metric(run, "stick_speed"), 1e-8,
                "max |v_tau| over wall nodes with traction < s* - 1e-6"),
        at_least("stick-nodes", metric(run, "stick_nodes"), 1.0),
        at_least("slip-nodes", metric(run, "slip_nodes"), 1.0),
    };
  };
  return s;
}

}  // namespace

double mms_max_speed(const SimConfig& cfg) {
  const double c = 1.0 + cfg.slip.gamma_star / (2.0 * cfg.rheology.nu_star);
  return kMmsAmplitude * (0.25 + c / 16.0);
}

SimConfig newtonian_mms_config(int n, std::int64_t steps) {
  SimConfig c;
  c.name = "newtonian-mms";
  c.grid = Grid(n, n, 1.0, 1.0);
  c.rheology.q_star = 0.0;
  c.rheology.delta_star = 0.0;
  c.rheology.reg_n = 1000000000;
  c.slip.s_star = 0.0;
  c.slip.beta_star = 0.0;
  c.slip.gamma_star = 1.0;
  c.body_force.kind = BodyForceSpec::Kind::mms_newtonian;
  c.body_force.amplitude = kMmsAmplitude;
  c.initial_velocity.kind = InitialVelocitySpec::Kind::mms_newtonian;
  c.initial_velocity.amplitude = kMmsAmplitude;
  c.time.dt = 0.25 * c.grid.hx() / mms_max_speed(c);
  c.time.t_end = static_cast<double>(steps) * c.time.dt;
  return c;
}

std::vector<Scenario> builtin_scenarios() {
  return {quiescent_plug(), fluidization_front(), newtonian_mms(), heat_decay(), slip_threshold()};
}

Scenario find_scenario(const std::string& name) {
  for (Scenario& s : builtin_scenarios())
    if (s.name == name) return s;
  throw std::out_of_range("unknown scenario '" + name + "'");
}

ScenarioRun run_scenario(const Scenario& s, const std::vector<Observer>& extra_observers) {
  ScenarioRun run(s.cfg);
  run.name = s.name;
  try {
    s.cfg.validate();
    const VectorField v0 = s.initial_v ? s.initial_v(s.cfg) : initial_velocity(s.cfg);
    const ScalarField pf0 = s.initial_pf ? s.initial_pf(s.cfg) : initial_pore_pressure(s.cfg);
    run.initial = initial_state(s.cfg, v0, pf0);
    std::vector<Observer> observers{
        run.monitor.observer(),
        [&](const SimState& prev, const SimState& next, const StepInfo& info) {
          run.velocity_linf.push_back(next.v.linf_norm());
          if (info.cfl_warning && run.metrics.count("cfl_warned") == 0) {
            run.metrics["cfl_warned"] = 1.0;
            run.warnings.push_back("CFL number " + std::to_string(info.cfl) + " exceeds 0.5 at step " +
                                   std::to_string(info.step));
          }
          if (s.probe) s.probe(prev, next, info, run);
        }};
    observers.insert(observers.end(), extra_observers.begin(), extra_observers.end());
    run.final_state = simulate(s.cfg, run.initial.v, run.initial.p_f, observers);
  } catch (const std::exception& e) {
    throw ScenarioError(s.name, e.what());
  }

  bool normal_zero = true;
  for (const StepInfo& info : run.monitor.steps()) normal_zero = normal_zero && info.normal_zero;
  run.checks.push_back(at_most("divergence", run.monitor.max_div(), s.cfg.time.poisson_tol,
                               "max over steps of ||div v||_inf"));
  run.checks.push_back({"boundary-flux", normal_zero, normal_zero ? 0.0 : 1.0, 0.0, "v.n = 0 on every step"});
  run.checks.push_back({"dissipation-signs", run.monitor.dissipation_signs_ok(), 0.0, 0.0,
                        "plastic, slip and Newtonian dissipation >= 0 on every step"});
  run.checks.push_back({"velocity-bound", run.monitor.velocity_bound_ok(), run.monitor.velocity_bound_lhs(),
                        run.monitor.velocity_bound_rhs(), "discrete Gronwall bound on ||v||^2 + int ||D||^2"});
  run.checks.push_back({"pressure-accumulation", run.monitor.accumulation_monotone(), run.monitor.pressure_bound_lhs(),
                        run.monitor.pressure_bound_rhs(), "accumulated pore-pressure terms are monotone"});
  if (s.oracle) {
    std::vector<CheckResult> extra = s.oracle(run);
    run.checks.insert(run.checks.end(), extra.begin(), extra.end());
  }
  run.pass = std::all_of(run.checks.begin(), run.checks.end(), [](const CheckResult& c) { return c.pass; });
  return run;
}

std::vector<ScenarioRun> run_scenarios(const std::vector<Scenario>& list, int threads) {
  std::vector<std::optional<ScenarioRun>> slots(list.size());
  std::vector<std::exception_ptr> errors(list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < list.size(); k = next++) {
      try {
        slots[k].emplace(run_scenario(list[k]));
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(list.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<ScenarioRun> out;
  out.reserve(list.size());
  for (auto& slot : slots) out.push_back(std::move(*slot));
  return out;
}

int thread_count_from_env() {
  if (const char* env = std::getenv("GRANFLOW_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace granflow
