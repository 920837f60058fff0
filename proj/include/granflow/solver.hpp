#pragma once

// Time integration: backward Euler momentum step with explicit truncated
// convection, lagged-coefficient Picard iteration on the regularized stress,
// pressure correction by discrete Leray projection, then an implicit
// pore-pressure step with the new velocity.

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "granflow/config.hpp"
#include "granflow/dct_solver.hpp"
#include "granflow/discretization.hpp"
#include "granflow/fields.hpp"

namespace granflow {

struct SimState {
  double t = 0.0;
  VectorField v;
  ScalarField p;
  ScalarField p_f;
};

class PicardNoConvergence : public std::runtime_error {
 public:
  PicardNoConvergence(int iterations, double residual);
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// Wraps any failure inside simulate() with the index of the failing step.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(std::int64_t step, const std::string& what);
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

struct StepInfo {
  std::int64_t step = 0;  // 1-based index of the step just taken
  double t = 0.0;
  int picard_iterations = 0;
  double picard_residual = 0.0;
  std::size_t momentum_cg_iterations = 0;
  std::size_t poisson_cg_iterations = 0;
  std::size_t pore_cg_iterations = 0;
  double div_linf = 0.0;
  bool normal_zero = true;
  double cfl = 0.0;
  bool cfl_warning = false;
};

struct LerayResult {
  VectorField v;
  ScalarField psi;  // mean-free potential, v = v_star - grad psi
  std::size_t iterations = 0;
};

/// Discrete Helmholtz projection onto divergence-free fields with v.n = 0.
LerayResult leray_project(const VectorField& v_star, double poisson_tol = 1e-10);

/// Holds the per-grid linear solvers of one simulation. Not shareable across threads.
class Stepper {
 public:
  explicit Stepper(const SimConfig& cfg);

  const SimConfig& config() const { return cfg_; }

  /// Advances v and p to t + dt with p_f held at its current value.
  SimState momentum(const SimState& state, StepInfo* info = nullptr);

  /// Advances p_f from t_prev to state.t using the velocity stored in state.
  SimState pore_pressure(const SimState& state, double t_prev, StepInfo* info = nullptr);

  /// Momentum step followed by the pore-pressure step.
  SimState step(const SimState& state, StepInfo* info = nullptr);

  LerayResult project(const VectorField& v_star);

  /// Yield stress per cell for the given pore pressure at time t.
  ScalarField yield_field(const ScalarField& p_f, double t) const;

 private:
  SimConfig cfg_;
  DctSolver poisson_;
  DctSolver pore_;
};

SimState momentum_step(const SimState& state, const SimConfig& cfg);

/// Advances t by dt and p_f accordingly, using state.v as the transporting velocity.
SimState pore_pressure_step(const SimState& state, const SimConfig& cfg);

/// v_f = v - (1/alpha) phi(p - p_f) (grad p_f - rho_f b) on interior faces.
VectorField fluid_velocity(const SimState& state, const SimConfig& cfg);

using Observer = std::function<void(const SimState& prev, const SimState& next, const StepInfo& info)>;

/// Projects v0 once, then steps to t_end. Observers run on the calling thread after each step.
SimState simulate(const SimConfig& cfg, const VectorField& v0, const ScalarField& pf0,
                  const std::vector<Observer>& observers = {});

/// Uses the initial data described by cfg.
SimState simulate(const SimConfig& cfg, const std::vector<Observer>& observers = {});

/// Projected initial state at t = 0 with zero pressure.
SimState initial_state(const SimConfig& cfg, const VectorField& v0, const ScalarField& pf0);

}  // namespace granflow
