#include "granflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "granflow/discretization.hpp"
#include "granflow/operators.hpp"

namespace granflow {

namespace {

double partner_v_at_u_face(const VectorField& w, int i, int j) {
  const Grid& g = w.grid();
  double acc = 0.0;
  int count = 0;
  for (int ii : {i - 1, i}) {
    if (ii < 0 || ii >= g.nx) continue;
    acc += w.v(ii, j) + w.v(ii, j + 1);
    count += 2;
  }
  return acc / count;
}

double partner_u_at_v_face(const VectorField& w, int i, int j) {
  const Grid& g = w.grid();
  double acc = 0.0;
  int count = 0;
  for (int jj : {j - 1, j}) {
    if (jj < 0 || jj >= g.ny) continue;
    acc += w.u(i, jj) + w.u(i + 1, jj);
    count += 2;
  }
  return acc / count;
}

double u_face_magnitude(const VectorField& w, int i, int j) { return std::hypot(w.u(i, j), partner_v_at_u_face(w, i, j)); }
double v_face_magnitude(const VectorField& w, int i, int j) { return std::hypot(w.v(i, j), partner_u_at_v_face(w, i, j)); }

double radial_scale(double magnitude, double lambda) {
  return magnitude > lambda ? lambda / magnitude : 1.0;
}

// Frobenius norm of the centred-difference gradient of a collocated vector field at an interior cell.
double collocated_gradient_norm(const std::vector<Vec2>& f, const Grid& g, int i, int j) {
  auto at = [&](int a, int b) { return f[static_cast<std::size_t>(b) * g.nx + a]; };
  const Vec2 dx = (0.5 / g.hx()) * (at(i + 1, j) - at(i - 1, j));
  const Vec2 dy = (0.5 / g.hy()) * (at(i, j + 1) - at(i, j - 1));
  return std::sqrt(dx.x * dx.x + dx.y * dx.y + dy.x * dy.x + dy.y * dy.y);
}

}  // namespace

VectorField linf_truncate(const VectorField& w, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("linf_truncate: lambda must be > 0");
  const Grid& g = w.grid();
  VectorField out = w;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) out.u(i, j) *= radial_scale(u_face_magnitude(w, i, j), lambda);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.v(i, j) *= radial_scale(v_face_magnitude(w, i, j), lambda);
  return out;
}

TruncationReport truncation_report(const VectorField& w, double lambda) {
  const Grid& g = w.grid();
  const VectorField t = linf_truncate(w, lambda);
  TruncationReport r;
  r.lambda = lambda;
  r.pre_norm = w.l2_norm();
  r.post_norm = t.l2_norm();
  r.post_linf = t.linf_norm();

  std::vector<char> u_flag(w.u_values().size(), 0), v_flag(w.v_values().size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const bool f = u_face_magnitude(w, i, j) > lambda;
      u_flag[w.u_index(i, j)] = f;
      r.flagged_faces += f;
      if (!f) r.identity_defect = std::max(r.identity_defect, std::abs(t.u(i, j) - w.u(i, j)));
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool f = v_face_magnitude(w, i, j) > lambda;
      v_flag[w.v_index(i, j)] = f;
      r.flagged_faces += f;
      if (!f) r.identity_defect = std::max(r.identity_defect, std::abs(t.v(i, j) - w.v(i, j)));
    }

  const ScalarField div = divergence(t);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const bool flagged = u_flag[w.u_index(i, j)] || u_flag[w.u_index(i + 1, j)] || v_flag[w.v_index(i, j)] ||
                           v_flag[w.v_index(i, j + 1)];
      if (!flagged) r.div_violation = std::max(r.div_violation, std::abs(div(i, j)));
    }

  std::vector<Vec2> wc(g.cell_count()), tc(g.cell_count());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
      wc[k] = w.cell_average(i, j);
      tc[k] = radial_scale(norm(wc[k]), lambda) * wc[k];
    }
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      const double m = norm(wc[static_cast<std::size_t>(j) * g.nx + i]);
      if (!(m > lambda)) continue;
      const double bound = 2.0 * lambda * collocated_gradient_norm(wc, g, i, j) / m;
      const double grad_t = collocated_gradient_norm(tc, g, i, j);
      if (bound > 0.0) r.grad_bound_ratio = std::max(r.grad_bound_ratio, grad_t / bound);
      else if (grad_t > 0.0) r.grad_bound_ratio = std::numeric_limits<double>::infinity();
    }
  return r;
}

LayerSelection truncation_layers(const VectorField& w, const ScalarField& diagnostic, int N) {
  if (N < 2) throw std::invalid_argument("truncation_layers: N must be >= 2");
  const Grid& g = w.grid();
  const double area = g.cell_area();
  LayerSelection sel;
  sel.layer_integrals.assign(static_cast<std::size_t>(N), 0.0);
  bool any = false;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double m = norm(w.cell_average(i, j));
      const double d = diagnostic(i, j) * area;
      sel.total += d;
      double lo = static_cast<double>(N);
      for (int layer = 1; layer <= N; ++layer, lo *= N) {
        if (m >= lo && m < lo * N) {
          sel.layer_integrals[static_cast<std::size_t>(layer - 1)] += d;
          any = true;
          break;
        }
      }
    }
  if (!any) throw DegenerateField();
  const auto best = std::min_element(sel.layer_integrals.begin(), sel.layer_integrals.end());
  sel.layer = static_cast<int>(best - sel.layer_integrals.begin()) + 1;
  sel.lambda = std::pow(static_cast<double>(N), sel.layer);
  return sel;
}

double truncation_level_select(const VectorField& w, const ScalarField& diagnostic, int N) {
  return truncation_layers(w, diagnostic, N).lambda;
}

// ---- lemma harness -----------------------------------------------------------

bool LemmaRunReport::all_finite() const {
  auto finite = [](const std::vector<double>& xs) {
    return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
  };
  return finite(residual_c1) && finite(residual_c3) && finite(pairing_gap) &&
         residual_c1.size() == n_values.size() && residual_c3.size() == n_values.size() &&
         pairing_gap.size() == n_values.size();
}

bool LemmaRunReport::nonincreasing(const std::vector<double>& xs, double noise) {
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (xs[k] > (1.0 + noise) * xs[k - 1]) return false;
  return true;
}

LemmaRunReport lemma_harness(const LemmaFamily& family, const std::vector<std::int64_t>& n_values) {
  const Grid& g = family.grid;
  const RheologyParams& r = family.rheology;
  const double area = g.cell_area();
  LemmaRunReport rep;
  rep.family = family.name;
  rep.n_values = n_values;

  const std::size_t cells = g.cell_count();
  std::vector<double> tau(cells);
  std::vector<SymTensor2> v_limit(cells);
  double limit_pairing = 0.0;
  for (std::size_t k = 0; k < cells; ++k) {
    const SymTensor2& d = family.limit.D.values()[k];
    tau[k] = yield_stress(family.p_s.values()[k], family.limit.p_f.values()[k], r.q_star);
    rep.tau_max = std::max(rep.tau_max, tau[k]);
    v_limit[k] = viscous_stress_activated(d, r.nu_star, r.delta_star, r.q_exponent);
    limit_pairing += tau[k] * norm(d) * area;
  }

  for (const std::int64_t n : n_values) {
    const LemmaSample s = family.member(n);
    double c1 = 0.0, c3 = 0.0, pairing = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
      const SymTensor2& dn = s.D.values()[k];
      const double tau_n = yield_stress(family.p_s.values()[k], s.p_f.values()[k], r.q_star);
      const SymTensor2 zn = plastic_stress_reg(dn, tau_n, n);
      const SymTensor2 vn = viscous_stress_activated(dn, r.nu_star, r.delta_star, r.q_exponent);
      c1 += bulk_implicit_residual(zn, family.limit.D.values()[k], tau[k]) * area;
      const double dv = norm(vn - v_limit[k]);
      c3 += dv * dv * area;
      pairing += contract(zn, dn) * area;
    }
    rep.residual_c1.push_back(c1);
    rep.residual_c3.push_back(std::sqrt(c3));
    rep.pairing_gap.push_back(pairing - limit_pairing);
  }
  return rep;
}

std::vector<LemmaFamily> builtin_lemma_families(const Grid& grid, const RheologyParams& rheology) {
  using std::numbers::pi;
  auto tensor_field = [&](const std::function<SymTensor2(double, double)>& f) {
    SymTensorField out(grid);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) out(i, j) = f(grid.xc(i), grid.yc(j));
    return out;
  };
  // |D| in [1, 3], trace-free, rotating direction.
  const auto base = [](double x, double y) {
    const double r = 2.0 + std::sin(2.0 * pi * x) * std::cos(2.0 * pi * y);
    const double th = pi * (x + y);
    const double s = r / std::sqrt(2.0);
    return SymTensor2{s * std::cos(th), -s * std::cos(th), s * std::sin(th)};
  };
  const auto perturbation = [](double x, double y) {
    return SymTensor2{std::sin(3.0 * pi * x), std::cos(2.0 * pi * y), 0.5 * std::sin(pi * x * y)};
  };
  const auto plug_base = [&](double x, double y) { return x < 1.0 / 3.0 ? SymTensor2{} : base(x, y); };

  const ScalarField p_s = ScalarField::sample(grid, [](double, double y) { return 1.0 + y; });
  const ScalarField p_f = ScalarField::sample(grid, [](double x, double) { return 0.5 + 0.8 * x; });
  const ScalarField q = ScalarField::sample(grid, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });

  auto shifted = [grid](const SymTensorField& d, const SymTensorField& pert, const ScalarField& pf,
                        const ScalarField& pq, double eps) {
    LemmaSample s{d, pf};
    for (std::size_t k = 0; k < grid.cell_count(); ++k) {
      s.D.values()[k] = d.values()[k] + eps * pert.values()[k];
      s.p_f.values()[k] += eps * pq.values()[k];
    }
    return s;
  };

  const SymTensorField d_base = tensor_field(base);
  const SymTensorField d_plug = tensor_field(plug_base);
  const SymTensorField pert = tensor_field(perturbation);
  const ScalarField zero(grid);

  std::vector<LemmaFamily> out;
  out.push_back({"frozen", grid, rheology, p_s, [d_base, p_f](std::int64_t) { return LemmaSample{d_base, p_f}; },
                 LemmaSample{d_base, p_f}});
  out.push_back({"perturbed", grid, rheology, p_s,
                 [=](std::int64_t n) { return shifted(d_base, pert, p_f, q, 1.0 / static_cast<double>(n)); },
                 LemmaSample{d_base, p_f}});
  out.push_back({"plug-region", grid, rheology, p_s,
                 [=](std::int64_t n) { return shifted(d_plug, pert, p_f, zero, 1.0 / static_cast<double>(n)); },
                 LemmaSample{d_plug, p_f}});
  return out;
}

// ---- energy ------------------------------------------------------------------

EnergyReport energy_report(const SimState& prev, const SimState& next, const SimConfig& cfg) {
  const Grid& g = cfg.grid;
  const double dt = cfg.time.dt;
  const double rho = cfg.physics.rho_s;
  const double K = cfg.physics.permeability;
  EnergyReport e;
  e.dt = dt;

  const double v0_sq = prev.v.dot(prev.v);
  const double v1_sq = next.v.dot(next.v);
  e.kinetic_prev = 0.5 * rho * v0_sq;
  e.kinetic_next = 0.5 * rho * v1_sq;
  e.kinetic_rate = (e.kinetic_next - e.kinetic_prev) / dt;
  VectorField dv = next.v;
  dv -= prev.v;
  e.increment = 0.5 * rho * dv.dot(dv) / dt;

  ScalarField tau(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      tau(i, j) = yield_stress(lithostatic_pressure(cfg, next.t, g.xc(i), g.yc(j)), prev.p_f(i, j), cfg.rheology.q_star);
  const StressState st = evaluate_stress_state(next.v, tau, cfg.rheology, cfg.slip);
  const DissipationTerms d = dissipation_terms(st);
  e.stress_power = d.stress_power;
  e.plastic = d.plastic;
  e.viscous = d.viscous;
  e.strain_sq = d.strain_sq;
  e.newtonian = cfg.rheology.nu_star * d.strain_sq;
  e.slip = d.slip;

  const VectorField b = body_force_field(cfg, next.t);
  e.forcing_work = rho * b.dot(next.v);
  e.convective_work = rho * convective_term_truncated(prev.v, cfg.rheology.reg_n).dot(next.v);
  e.pressure_work = gradient(next.p).dot(next.v);
  e.balance_residual = e.kinetic_rate + e.increment + e.stress_power + e.slip + e.convective_work +
                       e.pressure_work - e.forcing_work;

  const double delta = cfg.rheology.delta_star;
  e.lhs = e.kinetic_rate + e.newtonian + e.plastic + e.slip;
  e.rhs = e.forcing_work + 3.0 * cfg.rheology.nu_star * delta * delta * g.area();
  e.margin = e.rhs - e.lhs;
  e.slack = std::max(0.0, -e.margin);
  e.total_dissipation = e.stress_power + e.slip;
  e.div_linf = divergence(next.v).linf_norm();

  const double pf0 = prev.p_f.l2_norm();
  const double pf1 = next.p_f.l2_norm();
  e.pf_norm_sq_prev = pf0 * pf0;
  e.pf_norm_sq_next = pf1 * pf1;
  const VectorField grad_pf = gradient(next.p_f);
  e.pf_grad_sq = grad_pf.dot(grad_pf);
  VectorField b_inner = b;
  b_inner.zero_boundary_normal();
  const ScalarField ps = lithostatic_field(cfg, next.t);
  const ScalarField adv_ps = advect_scalar(ps, next.v, cfg.physics.advection);
  double src = K * cfg.physics.rho_f * b_inner.dot(grad_pf);
  double adv_self = 0.0, dtps = 0.0;
  const ScalarField adv_pf = advect_scalar(prev.p_f, next.v, cfg.physics.advection);
  const ScalarField ps_prev = lithostatic_field(cfg, prev.t);
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    const double p1 = next.p_f.values()[k];
    src += adv_ps.values()[k] * p1 * g.cell_area();
    adv_self += adv_pf.values()[k] * p1 * g.cell_area();
    if (cfg.physics.include_dt_ps) dtps += (ps.values()[k] - ps_prev.values()[k]) / dt * p1 * g.cell_area();
  }
  e.pf_source = src + dtps;
  // Exact discrete identity:
  //   (|p1|^2 - |p0|^2)/(2dt) + |p1 - p0|^2/(2dt) + K |grad p1|^2 = source - (v . grad p0, p1).
  ScalarField dp = next.p_f;
  for (std::size_t k = 0; k < g.cell_count(); ++k) dp.values()[k] -= prev.p_f.values()[k];
  const double dp_sq = dp.l2_norm() * dp.l2_norm();
  e.pf_delta2 = 0.5 * (e.pf_norm_sq_next - e.pf_norm_sq_prev) / dt + K * e.pf_grad_sq - e.pf_source;
  e.pf_balance = 0.5 * (e.pf_norm_sq_next - e.pf_norm_sq_prev) / dt + 0.5 * dp_sq / dt + K * e.pf_grad_sq -
                 e.pf_source + adv_self;
  return e;
}

void EnergyMonitor::observe(const SimState& prev, const SimState& next, const StepInfo& info) {
  const EnergyReport e = energy_report(prev, next, cfg_);
  const double dt = cfg_.time.dt;
  const double rho = cfg_.physics.rho_s;
  const double K = cfg_.physics.permeability;
  const double nu_rho = cfg_.rheology.nu_star / rho;
  const double delta = cfg_.rheology.delta_star;
  if (!started_) {
    started_ = true;
    v0_sq_ = prev.v.dot(prev.v);
    pf0_sq_ = e.pf_norm_sq_prev;
  }
  const double before_d = int_d_, before_b = int_b_, before_g = int_grad_pf_, before_s = int_src_;
  int_d_ += e.strain_sq * dt;
  const VectorField b = body_force_field(cfg_, next.t);
  int_b_ += b.dot(b) * dt;
  int_grad_pf_ += e.pf_grad_sq * dt;

  VectorField flux = b;
  flux.zero_boundary_normal();
  flux *= K * cfg_.physics.rho_f;
  const ScalarField ps = lithostatic_field(cfg_, next.t);
  const Grid& g = cfg_.grid;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) flux.u(i, j) -= 0.5 * (ps(i - 1, j) + ps(i, j)) * next.v.u(i, j);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) flux.v(i, j) -= 0.5 * (ps(i, j - 1) + ps(i, j)) * next.v.v(i, j);
  int_src_ += flux.dot(flux) * dt;

  const double tol = 1e-12;
  vel_lhs_ = next.v.dot(next.v) + 2.0 * nu_rho * int_d_;
  vel_rhs_ = std::exp(next.t) * (v0_sq_ + int_b_ + 6.0 * nu_rho * delta * delta * g.area() * next.t);
  if (!(vel_lhs_ <= vel_rhs_ * (1.0 + tol) + tol)) velocity_bound_ok_ = false;
  pf_lhs_ = e.pf_norm_sq_next + K * int_grad_pf_;
  pf_rhs_ = pf0_sq_ + int_src_ / K;
  if (!(pf_lhs_ <= pf_rhs_ * (1.0 + tol) + tol)) pressure_bound_ok_ = false;
  if (int_d_ < before_d || int_b_ < before_b || int_grad_pf_ < before_g || int_src_ < before_s ||
      !std::isfinite(vel_lhs_) || !std::isfinite(pf_lhs_))
    accumulation_monotone_ = false;

  reports_.push_back(e);
  steps_.push_back(info);
}

Observer EnergyMonitor::observer() {
  return [this](const SimState& prev, const SimState& next, const StepInfo& info) { observe(prev, next, info); };
}

double EnergyMonitor::max_slack_ratio() const {
  double worst = 0.0;
  for (const EnergyReport& e : reports_) {
    if (e.slack == 0.0) continue;
    worst = std::max(worst, e.total_dissipation > 0.0 ? e.slack / e.total_dissipation
                                                      : std::numeric_limits<double>::infinity());
  }
  return worst;
}

double EnergyMonitor::max_div() const {
  double m = 0.0;
  for (const StepInfo& s : steps_) m = std::max(m, s.div_linf);
  return m;
}

bool EnergyMonitor::dissipation_signs_ok() const {
  return std::all_of(reports_.begin(), reports_.end(), [](const EnergyReport& e) {
    return e.plastic >= 0.0 && e.slip >= 0.0 && e.newtonian >= 0.0;
  });
}

// ---- manufactured solutions ---------------------------------------------------

double mms_error(const SimState& state, const VectorFunction& exact, NormKind kind) {
  const Grid& g = state.v.grid();
  double sum = 0.0, worst = 0.0;
  auto acc = [&](double diff) {
    sum += diff * diff;
    worst = std::max(worst, std::abs(diff));
  };
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) acc(state.v.u(i, j) - exact(state.t, i * g.hx(), g.yc(j)).x);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) acc(state.v.v(i, j) - exact(state.t, g.xc(i), j * g.hy()).y);
  return kind == NormKind::L2 ? std::sqrt(sum * g.cell_area()) : worst;
}

double mms_error(const ScalarField& field, double t, const ScalarFunction& exact, NormKind kind) {
  const Grid& g = field.grid();
  double sum = 0.0, worst = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double diff = field(i, j) - exact(t, g.xc(i), g.yc(j));
      sum += diff * diff;
      worst = std::max(worst, std::abs(diff));
    }
  return kind == NormKind::L2 ? std::sqrt(sum * g.cell_area()) : worst;
}

std::vector<double> observed_orders(const std::vector<double>& errors, double refinement) {
  std::vector<double> out;
  for (std::size_t k = 1; k < errors.size(); ++k)
    out.push_back(std::log(errors[k - 1] / errors[k]) / std::log(refinement));
  return out;
}

}  // namespace granflow
