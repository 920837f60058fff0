#pragma once

// Verification instruments: L-infinity truncation and level selection, the
// convergence-lemma harness, discrete energy balances, manufactured-solution errors.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "granflow/config.hpp"
#include "granflow/fields.hpp"
#include "granflow/solver.hpp"

namespace granflow {

// ---- L-infinity truncation -------------------------------------------------

/// Face-wise w min(1, lambda/|w|); |w| at a face combines the face component with
/// the average of the four neighbouring partner components.
VectorField linf_truncate(const VectorField& w, double lambda);

struct TruncationReport {
  double lambda = 0.0;
  double pre_norm = 0.0;
  double post_norm = 0.0;
  double post_linf = 0.0;
  /// max |div T(w)| over cells whose four faces are all unflagged
  double div_violation = 0.0;
  /// max over flagged cells of |grad T(w)| / (2 lambda |grad w| / |w|), collocated at cell centres
  double grad_bound_ratio = 0.0;
  /// max |T(w) - w| over unflagged faces
  double identity_defect = 0.0;
  std::size_t flagged_faces = 0;
};

TruncationReport truncation_report(const VectorField& w, double lambda);

class DegenerateField : public std::runtime_error {
 public:
  DegenerateField() : std::runtime_error("no cell lies in any truncation layer") {}
};

struct LayerSelection {
  double lambda = 0.0;
  int layer = 0;                        // i* in [1, N]
  std::vector<double> layer_integrals;  // index i-1 holds layer i
  double total = 0.0;                   // diagnostic integrated over the whole domain
};

/// Layers Q_i = {N^i <= |w| < N^{i+1}}, i = 1..N, with |w| the cell-centred magnitude.
/// Picks the layer with the smallest diagnostic integral (smallest i on ties).
/// Throws DegenerateField when every layer is empty.
LayerSelection truncation_layers(const VectorField& w, const ScalarField& diagnostic, int N);

double truncation_level_select(const VectorField& w, const ScalarField& diagnostic, int N);

// ---- convergence-lemma harness ---------------------------------------------

struct LemmaSample {
  SymTensorField D;
  ScalarField p_f;
};

struct LemmaFamily {
  std::string name;
  Grid grid;
  RheologyParams rheology;
  ScalarField p_s;
  std::function<LemmaSample(std::int64_t n)> member;
  LemmaSample limit;
};

struct LemmaRunReport {
  std::string family;
  std::vector<std::int64_t> n_values;
  std::vector<double> residual_c1;
  std::vector<double> residual_c3;
  std::vector<double> pairing_gap;
  double tau_max = 0.0;

  bool all_finite() const;
  /// Each entry at most (1 + noise) times its predecessor.
  static bool nonincreasing(const std::vector<double>& xs, double noise);
};

LemmaRunReport lemma_harness(const LemmaFamily& family, const std::vector<std::int64_t>& n_values);

/// frozen: D_n = D; perturbed: D_n = D + P/n and p_f_n = p_f + q/n; plug-region:
/// D = 0 on the left third, D_n = P/n there.
std::vector<LemmaFamily> builtin_lemma_families(const Grid& grid, const RheologyParams& rheology);

// ---- energy ----------------------------------------------------------------

struct EnergyReport {
  double dt = 0.0;
  double kinetic_prev = 0.0;  // rho/2 ||v||^2
  double kinetic_next = 0.0;
  double kinetic_rate = 0.0;
  double increment = 0.0;     // rho/2 ||v1 - v0||^2 / dt
  double stress_power = 0.0;  // (S, D)_h
  double plastic = 0.0;
  double viscous = 0.0;
  double newtonian = 0.0;     // nu ||D||_h^2
  double strain_sq = 0.0;
  double slip = 0.0;
  double forcing_work = 0.0;     // rho (b, v1)
  double convective_work = 0.0;  // rho (C(v0), v1)
  double pressure_work = 0.0;    // (grad p1, v1)
  double balance_residual = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;   // max(0, lhs - rhs)
  double margin = 0.0;  // rhs - lhs
  double total_dissipation = 0.0;
  double div_linf = 0.0;

  double pf_norm_sq_prev = 0.0;
  double pf_norm_sq_next = 0.0;
  double pf_grad_sq = 0.0;  // ||grad p_f||^2
  double pf_source = 0.0;
  double pf_delta2 = 0.0;   // (|p1|^2 - |p0|^2)/(2dt) + K |grad p1|^2 - source, O(dt) for pure diffusion
  double pf_balance = 0.0;  // exact discrete identity defect
};

EnergyReport energy_report(const SimState& prev, const SimState& next, const SimConfig& cfg);

/// Running bounds along a trajectory: the velocity estimate
///   ||v||^2 + 2 (nu/rho) int ||D||^2 <= e^t (||v0||^2 + int ||b||^2 + 6 (nu/rho) delta^2 |Omega| t)
/// and the pore-pressure estimate
///   ||p_f||^2 + K int ||grad p_f||^2 <= ||p_f0||^2 + (1/K) int ||K rho_f b - p_s v||^2.
class EnergyMonitor {
 public:
  explicit EnergyMonitor(const SimConfig& cfg) : cfg_(cfg) {}

  void observe(const SimState& prev, const SimState& next, const StepInfo& info);
  Observer observer();

  const std::vector<EnergyReport>& reports() const { return reports_; }
  const std::vector<StepInfo>& steps() const { return steps_; }

  double max_slack_ratio() const;  // max slack / total dissipation over steps with dissipation > 0
  double max_div() const;
  bool dissipation_signs_ok() const;
  bool velocity_bound_ok() const { return velocity_bound_ok_; }
  bool pressure_bound_ok() const { return pressure_bound_ok_; }
  bool accumulation_monotone() const { return accumulation_monotone_; }
  double velocity_bound_lhs() const { return vel_lhs_; }
  double velocity_bound_rhs() const { return vel_rhs_; }
  double pressure_bound_lhs() const { return pf_lhs_; }
  double pressure_bound_rhs() const { return pf_rhs_; }

 private:
  SimConfig cfg_;
  std::vector<EnergyReport> reports_;
  std::vector<StepInfo> steps_;
  bool started_ = false;
  double v0_sq_ = 0.0, pf0_sq_ = 0.0;
  double int_d_ = 0.0, int_b_ = 0.0, int_grad_pf_ = 0.0, int_src_ = 0.0;
  double vel_lhs_ = 0.0, vel_rhs_ = 0.0, pf_lhs_ = 0.0, pf_rhs_ = 0.0;
  bool velocity_bound_ok_ = true;
  bool pressure_bound_ok_ = true;
  bool accumulation_monotone_ = true;
};

// ---- manufactured solutions ------------------------------------------------

enum class NormKind { L2, Linf };

using VectorFunction = std::function<Vec2(double t, double x, double y)>;
using ScalarFunction = std::function<double(double t, double x, double y)>;

/// Velocity error against the exact field sampled on faces at state.t (boundary normal faces excluded).
double mms_error(const SimState& state, const VectorFunction& exact, NormKind norm);

/// Cell-centred error of a scalar field against f(t, x, y).
double mms_error(const ScalarField& field, double t, const ScalarFunction& exact, NormKind norm);

/// log2(e_coarse / e_fine) for successive pairs.
std::vector<double> observed_orders(const std::vector<double>& errors, double refinement = 2.0);

}  // namespace granflow
