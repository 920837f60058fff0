#pragma once

// Property and oracle suite behind `granflow verify` and the acceptance binary.

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "granflow/scenarios.hpp"

namespace granflow {

struct VerifyOptions {
  std::uint64_t seed = 0x5eed5eedULL;
  /// Test hook: flips the sign of the regularized plastic stress inside the monotonicity check.
  bool inject_plastic_sign_fault = false;
  /// Stop after the first failing check.
  bool fail_fast = true;
  int threads = 1;
};

/// 100 random frozen (D, tau): residual(Z_n, D, tau) <= tau/n and residual(2n)/residual(n) <= 0.55, n = 1..256.
CheckResult check_regularization_decay(const VerifyOptions& opts);

/// 1e5 random pairs for Z_n and for V with q in {1.5, 2, 3}: (F(D) - F(E)):(D - E) >= -1e-12 (1 + |D| + |E|)^2.
CheckResult check_monotonicity(const VerifyOptions& opts);

/// Frame indifference of total_stress and regularized slip collinearity at random samples.
CheckResult check_frame_indifference(const VerifyOptions& opts);

/// Per-step energy-inequality slack <= 5% of the total dissipation, dissipation signs >= 0.
CheckResult check_energy_inequality(const ScenarioRun& mms_run);

/// ||div v||_inf <= poisson_tol and v.n = 0 after every step of every run.
CheckResult check_divergence(const std::vector<ScenarioRun>& runs);

struct MmsStudy {
  std::vector<int> grids;
  std::vector<double> errors;  // L2 velocity error
  std::vector<double> orders;
};

/// Steady manufactured vortex at final time 200 * 0.25 h_64 / max|v| on each grid.
MmsStudy mms_convergence_study(const std::vector<int>& grids = {32, 64, 128});
CheckResult check_mms_order(const MmsStudy& study);

/// | ||p_f(t)|| / (||p_f0|| e^{-(pi/lx)^2 t}) - 1 | <= 0.02 over the run.
CheckResult check_heat_decay(const ScenarioRun& heat_run);

/// max over steps ||v||_inf <= 1e-8 with at least 500 steps.
CheckResult check_quiescence(const ScenarioRun& plug_run);

/// Wall nodes with traction < s* - 1e-6 have slip speed <= 1e-8.
CheckResult check_stick_branch(const ScenarioRun& slip_run);

/// 1000 random smooth divergence-free fields: ||T(w)||_inf <= lambda, T(w) = w where |w| <= lambda,
/// div T(w) = 0 on unflagged cells; selected layer integral <= total/N for N in {4, 8, 16}.
CheckResult check_truncation(const VerifyOptions& opts);

/// Gradient bound of the truncation within the factor-2 slack on the same random fields.
CheckResult check_truncation_gradient(const VerifyOptions& opts);

/// Three synthetic families: c1, c3 nonincreasing up to 10% and below 1e-2 of their first value at n = 256.
CheckResult check_lemma_harness();

/// Two runs of the scenario produce identical CSV text.
CheckResult check_determinism(const Scenario& s);

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool pass = true;
  std::string first_failure;

  nlohmann::json to_json() const;
};

VerifyReport run_verify(const VerifyOptions& opts);

}  // namespace granflow
