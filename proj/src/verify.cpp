#include "granflow/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "granflow/output.hpp"

namespace granflow {

namespace {

using Rng = std::mt19937_64;

std::string describe(const std::string& what, double value) {
  std::ostringstream os;
  os.precision(6);
  os << what << " " << value;
  return os.str();
}

SymTensor2 random_tensor(Rng& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {scale * u(rng), scale * u(rng), scale * u(rng)};
}

SymTensor2 with_norm(SymTensor2 d, double target) {
  const double m = norm(d);
  return m > 0.0 ? (target / m) * d : SymTensor2{target, 0.0, 0.0};
}

SymTensor2 rotate(const SymTensor2& a, double th) {
  const double c = std::cos(th), s = std::sin(th);
  // R A R^T with R = [[c, -s], [s, c]]
  const double xx = c * c * a.xx - 2.0 * c * s * a.xy + s * s * a.yy;
  const double yy = s * s * a.xx + 2.0 * c * s * a.xy + c * c * a.yy;
  const double xy = c * s * (a.xx - a.yy) + (c * c - s * s) * a.xy;
  return {xx, yy, xy};
}

double metric_or(const ScenarioRun& run, const std::string& key, double fallback) {
  const auto it = run.metrics.find(key);
  return it == run.metrics.end() ? fallback : it->second;
}

// Smooth divergence-free field from a random sine streamfunction, scaled to unit max component.
VectorField random_smooth_field(const Grid& g, Rng& rng) {
  using std::numbers::pi;
  std::normal_distribution<double> nd(0.0, 1.0);
  double a[3][3];
  for (auto& row : a)
    for (double& x : row) x = nd(rng);
  VectorField w = VectorField::from_streamfunction(g, [&](double x, double y) {
    double s = 0.0;
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) s += a[k][l] * std::sin((k + 1) * pi * x) * std::sin((l + 1) * pi * y);
    return s;
  });
  w.zero_boundary_normal();
  const double m = w.linf_norm();
  if (m > 0.0) w *= 1.0 / m;
  return w;
}

ScalarField random_smooth_scalar(const Grid& g, Rng& rng) {
  using std::numbers::pi;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng), ph = pi * u(rng);
  return ScalarField::sample(g, [=](double x, double y) {
    return a * std::cos(pi * x + ph) + b * std::sin(2.0 * pi * y) + c * std::cos(pi * (x + y));
  });
}

}  // namespace

CheckResult check_regularization_decay(const VerifyOptions& opts) {
  Rng rng(opts.seed);
  std::uniform_real_distribution<double> d_norm(5.0, 20.0), tau_dist(0.1, 10.0);
  double worst_bound = 0.0;  // max residual / (tau/n)
  double worst_ratio = 0.0;
  for (int s = 0; s < 100; ++s) {
    const SymTensor2 d = with_norm(random_tensor(rng, 1.0), d_norm(rng));
    const double tau = tau_dist(rng);
    double prev = -1.0;
    for (std::int64_t n = 1; n <= 256; n *= 2) {
      const double r = bulk_implicit_residual(plastic_stress_reg(d, tau, n), d, tau);
      worst_bound = std::max(worst_bound, r / (tau / static_cast<double>(n)));
      if (prev > 0.0) worst_ratio = std::max(worst_ratio, r / prev);
      prev = r;
    }
  }
  const bool pass = worst_bound <= 1.0 && worst_ratio <= 0.55;
  return {"regularization-residual-decay", pass, worst_ratio, 0.55,
          describe("max residual/(tau/n)", worst_bound) + "; " + describe("max residual(2n)/residual(n)", worst_ratio)};
}

CheckResult check_monotonicity(const VerifyOptions& opts) {
  Rng rng(opts.seed + 1);
  std::uniform_real_distribution<double> scale_dist(0.0, 1.0), tau_dist(0.0, 5.0);
  std::uniform_int_distribution<int> n_dist(1, 1000);
  const std::size_t pairs = 100000;
  const double sign = opts.inject_plastic_sign_fault ? -1.0 : 1.0;

  // worst normalized pairing: min (F(D) - F(E)):(D - E) / (1 + |D| + |E|)^2
  auto sample_scale = [&] { return std::pow(10.0, 4.0 * scale_dist(rng) - 2.0); };
  double worst_z = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const SymTensor2 d = random_tensor(rng, sample_scale());
    const SymTensor2 e = random_tensor(rng, sample_scale());
    const double tau = tau_dist(rng);
    const std::int64_t n = n_dist(rng);
    const SymTensor2 fz = sign * plastic_stress_reg(d, tau, n);
    const SymTensor2 ez = sign * plastic_stress_reg(e, tau, n);
    const double scale = (1.0 + norm(d) + norm(e)) * (1.0 + norm(d) + norm(e));
    worst_z = std::min(worst_z, contract(fz - ez, d - e) / scale);
  }
  double worst_v = 0.0;
  std::uniform_real_distribution<double> nu_dist(0.1, 2.0), delta_dist(0.0, 1.0);
  for (double q : {1.5, 2.0, 3.0}) {
    for (std::size_t k = 0; k < pairs; ++k) {
      const SymTensor2 d = random_tensor(rng, sample_scale());
      const SymTensor2 e = random_tensor(rng, sample_scale());
      const double nu = nu_dist(rng), delta = delta_dist(rng);
      const SymTensor2 fv = viscous_stress_activated(d, nu, delta, q);
      const SymTensor2 ev = viscous_stress_activated(e, nu, delta, q);
      const double scale = (1.0 + norm(d) + norm(e)) * (1.0 + norm(d) + norm(e));
      worst_v = std::min(worst_v, contract(fv - ev, d - e) / scale);
    }
  }
  const double worst = std::min(worst_z, worst_v);
  return {"monotonicity", worst >= -1e-12, worst, -1e-12,
          describe("min normalized pairing Z_n", worst_z) + "; " + describe("V (q = 1.5, 2, 3)", worst_v)};
}

CheckResult check_frame_indifference(const VerifyOptions& opts) {
  Rng rng(opts.seed + 2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    RheologyParams p;
    p.nu_star = 0.1 + u(rng);
    p.delta_star = u(rng);
    p.q_star = 2.0 * u(rng);
    p.q_exponent = 1.2 + 2.0 * u(rng);
    p.reg_n = 1 + static_cast<std::int64_t>(100 * u(rng));
    const SymTensor2 d = random_tensor(rng, 3.0);
    const double th = 2.0 * std::numbers::pi * u(rng);
    const double pf = 2.0 * u(rng), ps = 2.0 * u(rng);
    const StressSplit a = total_stress(rotate(d, th), pf, ps, p);
    const StressSplit b = total_stress(d, pf, ps, p);
    worst = std::max(worst, norm(a.S - rotate(b.S, th)) / (1.0 + norm(b.S)));
  }
  return {"frame-indifference", worst <= 1e-12, worst, 1e-12, "max |S(R D R^T) - R S(D) R^T| / (1 + |S|)"};
}

CheckResult check_energy_inequality(const ScenarioRun& run) {
  const double ratio = run.monitor.max_slack_ratio();
  const bool signs = run.monitor.dissipation_signs_ok();
  return {"energy-inequality", ratio <= 0.05 && signs && !run.monitor.reports().empty(), ratio, 0.05,
          describe("max slack / dissipation", ratio) + (signs ? "; signs ok" : "; negative dissipation term")};
}

CheckResult check_divergence(const std::vector<ScenarioRun>& runs) {
  double worst = 0.0;
  double tol = 1e-10;
  bool normal = true;
  std::size_t steps = 0;
  for (const ScenarioRun& r : runs) {
    tol = std::min(tol, r.cfg.time.poisson_tol);
    worst = std::max(worst, r.monitor.max_div());
    for (const StepInfo& s : r.monitor.steps()) {
      normal = normal && s.normal_zero;
      ++steps;
    }
  }
  return {"divergence-constraint", worst <= tol && normal && steps > 0, worst, tol,
          describe("max ||div v||_inf", worst) + (normal ? "; v.n = 0 on all steps" : "; nonzero boundary flux") +
              "; steps " + std::to_string(steps)};
}

MmsStudy mms_convergence_study(const std::vector<int>& grids) {
  MmsStudy study;
  study.grids = grids;
  // Same final time on every grid: 200 steps at the 64^2 CFL step.
  const SimConfig ref = newtonian_mms_config(64, 200);
  for (int n : grids) {
    SimConfig cfg = newtonian_mms_config(n, 1);
    const std::int64_t steps = std::max<std::int64_t>(1, std::llround(200.0 * n / 64.0));
    cfg.time.dt = ref.time.t_end / static_cast<double>(steps);
    cfg.time.t_end = ref.time.t_end;
    const SimState s = simulate(cfg);
    study.errors.push_back(mms_error(
        s, [&](double, double x, double y) { return mms_velocity(cfg, kMmsAmplitude, x, y); }, NormKind::L2));
  }
  study.orders = observed_orders(study.errors);
  return study;
}

CheckResult check_mms_order(const MmsStudy& study) {
  const double order = study.orders.empty() ? 0.0 : *std::min_element(study.orders.begin(), study.orders.end());
  std::ostringstream os;
  os.precision(4);
  os << "L2 errors";
  for (std::size_t k = 0; k < study.errors.size(); ++k) os << " " << study.grids[k] << ":" << study.errors[k];
  os << "; orders";
  for (double o : study.orders) os << " " << o;
  return {"mms-order", order >= 1.9, order, 1.9, os.str()};
}

CheckResult check_heat_decay(const ScenarioRun& run) {
  const double dev = metric_or(run, "decay_deviation", INFINITY);
  const double k = std::numbers::pi / run.cfg.grid.lx;
  const double efold = 1.0 / (k * k);
  const bool long_enough = run.final_state.t >= efold;
  return {"heat-decay", dev <= 0.02 && long_enough, dev, 0.02,
          describe("max relative amplitude deviation", dev) + describe("; final t", run.final_state.t) +
              describe("; e-folding time", efold)};
}

CheckResult check_quiescence(const ScenarioRun& run) {
  const double vmax =
      run.velocity_linf.empty() ? INFINITY : *std::max_element(run.velocity_linf.begin(), run.velocity_linf.end());
  const bool enough = run.velocity_linf.size() >= 500;
  return {"quiescence", vmax <= 1e-8 && enough, vmax, 1e-8,
          describe("max ||v||_inf", vmax) + "; steps " + std::to_string(run.velocity_linf.size())};
}

CheckResult check_stick_branch(const ScenarioRun& run) {
  const double speed = metric_or(run, "stick_speed", INFINITY);
  const double stick = metric_or(run, "stick_nodes", 0.0);
  return {"stick-branch", speed <= 1e-8 && stick > 0.0, speed, 1e-8,
          describe("max slip speed at sub-threshold wall nodes", speed) + describe("; stick nodes (final)", stick) +
              describe("; slip nodes (final)", metric_or(run, "slip_nodes", 0.0))};
}

CheckResult check_truncation(const VerifyOptions& opts) {
  Rng rng(opts.seed + 3);
  std::uniform_real_distribution<double> frac(0.2, 0.9);
  const Grid g(16, 16, 1.0, 1.0);
  double linf_excess = 0.0, identity = 0.0, div = 0.0, layer_excess = 0.0;
  std::size_t flagged = 0;
  for (int k = 0; k < 1000; ++k) {
    const VectorField w = random_smooth_field(g, rng);
    const double lambda = frac(rng);
    const TruncationReport r = truncation_report(w, lambda);
    linf_excess = std::max(linf_excess, r.post_linf - lambda);
    identity = std::max(identity, r.identity_defect);
    div = std::max(div, r.div_violation);
    flagged += r.flagged_faces;

    const ScalarField expo = random_smooth_scalar(g, rng);
    const ScalarField diag = random_smooth_scalar(g, rng);
    const auto [lo_it, hi_it] = std::minmax_element(expo.values().begin(), expo.values().end());
    const double lo = *lo_it, span = std::max(*hi_it - lo, 1e-12);
    for (int N : {4, 8, 16}) {
      // |w| = N^e with e spanning [1, N + 1): every cell lies in some layer.
      std::vector<double> e(g.cell_count());
      for (std::size_t c = 0; c < e.size(); ++c) e[c] = 1.0 + 0.999 * N * (expo.values()[c] - lo) / span;
      VectorField layered(g);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
          const int ic = std::min(i, g.nx - 1);
          layered.u(i, j) = std::pow(N, e[static_cast<std::size_t>(j) * g.nx + ic]);
        }
      ScalarField weight(g);
      for (std::size_t c = 0; c < e.size(); ++c) weight.values()[c] = 1.0 + diag.values()[c] * diag.values()[c];
      const LayerSelection sel = truncation_layers(layered, weight, N);
      layer_excess = std::max(layer_excess, sel.layer_integrals[static_cast<std::size_t>(sel.layer - 1)] -
                                                sel.total / N);
    }
  }
  const bool pass = linf_excess <= 0.0 && identity == 0.0 && div <= 1e-12 && layer_excess <= 0.0 && flagged > 0;
  return {"linf-truncation", pass, std::max({linf_excess, identity, layer_excess}), 0.0,
          describe("max(||T(w)||_inf - lambda)", linf_excess) + describe("; identity defect", identity) +
              describe("; div on unflagged cells", div) + describe("; max(selected - total/N)", layer_excess)};
}

CheckResult check_truncation_gradient(const VerifyOptions& opts) {
  Rng rng(opts.seed + 3);
  std::uniform_real_distribution<double> frac(0.2, 0.9);
  const Grid g(32, 32, 1.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const VectorField w = random_smooth_field(g, rng);
    worst = std::max(worst, truncation_report(w, frac(rng)).grad_bound_ratio);
  }
  return {"linf-truncation-gradient", worst <= 2.0, worst, 2.0,
          "max |grad T(w)| / (2 lambda |grad w| / |w|) over flagged cells"};
}

CheckResult check_lemma_harness() {
  const Grid g(32, 32, 1.0, 1.0);
  RheologyParams r;
  r.delta_star = 0.5;
  std::vector<std::int64_t> ns;
  for (std::int64_t n = 1; n <= 256; n *= 2) ns.push_back(n);
  bool pass = true;
  double worst_drop = 0.0;  // max final/initial
  std::ostringstream os;
  os.precision(4);
  for (const LemmaFamily& f : builtin_lemma_families(g, r)) {
    const LemmaRunReport rep = lemma_harness(f, ns);
    const bool mono = LemmaRunReport::nonincreasing(rep.residual_c1, 0.1) &&
                      LemmaRunReport::nonincreasing(rep.residual_c3, 0.1);
    auto drop = [](const std::vector<double>& xs) { return xs.front() > 0.0 ? xs.back() / xs.front() : 0.0; };
    const double d1 = drop(rep.residual_c1), d3 = drop(rep.residual_c3);
    const bool small = rep.residual_c1.back() <= 1e-2 * rep.residual_c1.front() &&
                       rep.residual_c3.back() <= 1e-2 * rep.residual_c3.front();
    pass = pass && mono && small && rep.all_finite();
    worst_drop = std::max({worst_drop, d1, d3});
    os << f.name << ": c1 " << rep.residual_c1.front() << "->" << rep.residual_c1.back() << ", c3 "
       << rep.residual_c3.front() << "->" << rep.residual_c3.back() << (mono ? "" : " (not monotone)") << "; ";
  }
  return {"lemma-harness", pass, worst_drop, 1e-2, os.str()};
}

CheckResult check_determinism(const Scenario& s) {
  const ScenarioRun a = run_scenario(s);
  const ScenarioRun b = run_scenario(s);
  const std::string ca = timeseries_csv(a.monitor), cb = timeseries_csv(b.monitor);
  const bool same = ca == cb && vtk_snapshot(a.final_state, a.cfg) == vtk_snapshot(b.final_state, b.cfg);
  return {"determinism:" + s.name, same, same ? 0.0 : 1.0, 0.0,
          std::to_string(a.monitor.reports().size()) + " rows compared"};
}

nlohmann::json VerifyReport::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckResult& c : checks)
    arr.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value}, {"threshold", c.threshold},
                   {"detail", c.detail}});
  nlohmann::json out = {{"pass", pass}, {"checks", arr}};
  if (!first_failure.empty()) out["first_failure"] = first_failure;
  return out;
}

VerifyReport run_verify(const VerifyOptions& opts) {
  VerifyReport rep;
  auto record = [&](CheckResult c) {
    if (!c.pass && rep.first_failure.empty()) rep.first_failure = c.name;
    rep.pass = rep.pass && c.pass;
    rep.checks.push_back(std::move(c));
    return rep.pass || !opts.fail_fast;
  };

  if (!record(check_regularization_decay(opts))) return rep;
  if (!record(check_monotonicity(opts))) return rep;
  if (!record(check_frame_indifference(opts))) return rep;
  if (!record(check_truncation(opts))) return rep;
  if (!record(check_truncation_gradient(opts))) return rep;
  if (!record(check_lemma_harness())) return rep;

  const std::vector<Scenario> scenarios = builtin_scenarios();
  const std::vector<ScenarioRun> runs = run_scenarios(scenarios, opts.threads);
  auto by_name = [&](const std::string& name) -> const ScenarioRun& {
    for (const ScenarioRun& r : runs)
      if (r.name == name) return r;
    throw std::out_of_range("missing scenario run " + name);
  };
  if (!record(check_heat_decay(by_name("heat-decay")))) return rep;
  if (!record(check_quiescence(by_name("quiescent-plug")))) return rep;
  if (!record(check_stick_branch(by_name("slip-threshold")))) return rep;
  if (!record(check_energy_inequality(by_name("newtonian-mms")))) return rep;
  if (!record(check_divergence(runs))) return rep;
  for (const ScenarioRun& r : runs)
    if (!record({"scenario:" + r.name, r.pass, 0.0, 0.0, "all oracle checks of the scenario"})) return rep;
  if (!record(check_mms_order(mms_convergence_study()))) return rep;
  record(check_determinism(find_scenario("quiescent-plug")));
  return rep;
}

}  // namespace granflow
