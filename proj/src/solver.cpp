#include "granflow/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "granflow/linear_solver.hpp"
#include "granflow/operators.hpp"

namespace granflow {

PicardNoConvergence::PicardNoConvergence(int iterations, double residual)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "Picard iteration did not converge after " << iterations << " iterations (relative change "
           << residual << ")";
        return os.str();
      }()),
      iterations_(iterations),
      residual_(residual) {}

SimulationError::SimulationError(std::int64_t step, const std::string& what)
    : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

namespace {

// Linearized stress S = 2 mu D + E with mu at cells and interior nodes; wall
// nodes carry S12 = orientation * gamma_eff * (nearest tangential velocity).
struct MomentumCoefficients {
  std::vector<double> mu_cell;
  std::vector<double> mu_node;
  std::vector<double> wall_node;  // signed gamma_eff per node, 0 off the walls
  std::vector<SymTensor2> e_cell;
  std::vector<double> e_node;
};

double implicit_secant(double d_norm, double tau, const RheologyParams& r) {
  const double n = static_cast<double>(r.reg_n);
  const double g = r.q_exponent == 2.0 ? 1.0 : std::pow(std::max(d_norm, 1e-14), r.q_exponent - 2.0);
  return 0.5 * tau / (d_norm + 1.0 / n) + r.nu_star * g;
}

MomentumCoefficients build_coefficients(const StressState& st, const RheologyParams& r) {
  const Grid& g = st.grid;
  MomentumCoefficients c;
  c.mu_cell.resize(g.cell_count());
  c.e_cell.resize(g.cell_count());
  const std::size_t n_nodes = static_cast<std::size_t>(g.nx + 1) * (g.ny + 1);
  c.mu_node.assign(n_nodes, 0.0);
  c.e_node.assign(n_nodes, 0.0);
  c.wall_node.assign(n_nodes, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
      const SymTensor2& d = st.D(i, j);
      const double dn = norm(d);
      const double mu = implicit_secant(dn, st.tau(i, j), r);
      c.mu_cell[k] = mu;
      // E = V(D) - 2 nu g D: the part of the activated viscous stress kept explicit.
      const double g_pow = r.q_exponent == 2.0 ? 1.0 : std::pow(std::max(dn, 1e-14), r.q_exponent - 2.0);
      c.e_cell[k] = st.V(i, j) - (2.0 * r.nu_star * g_pow) * d;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const std::size_t k = st.node_index(i, j);
      const SymTensor2& d = st.D_node[k];
      const double dn = norm(d);
      c.mu_node[k] = implicit_secant(dn, st.tau_node[k], r);
      const double g_pow = r.q_exponent == 2.0 ? 1.0 : std::pow(std::max(dn, 1e-14), r.q_exponent - 2.0);
      c.e_node[k] = st.V_node[k].xy - 2.0 * r.nu_star * g_pow * d.xy;
    }
  for (const WallNode& w : st.walls) {
    const double orient = (w.side == WallSide::bottom || w.side == WallSide::left) ? 1.0 : -1.0;
    c.wall_node[st.node_index(w.i, w.j)] = orient * w.gamma_eff;
  }
  return c;
}

// Face layout of the flat momentum vector: all u faces, then all v faces.
struct FaceLayout {
  int nx, ny;
  std::size_t nu() const { return static_cast<std::size_t>(nx + 1) * ny; }
  std::size_t nv() const { return static_cast<std::size_t>(nx) * (ny + 1); }
  std::size_t size() const { return nu() + nv(); }
  std::size_t u(int i, int j) const { return static_cast<std::size_t>(j) * (nx + 1) + i; }
  std::size_t v(int i, int j) const { return nu() + static_cast<std::size_t>(j) * nx + i; }
  std::size_t node(int i, int j) const { return static_cast<std::size_t>(j) * (nx + 1) + i; }
};

// out = div_h S for S given by cell diagonals and node off-diagonals; boundary faces untouched.
void add_stress_divergence(const FaceLayout& L, double hx, double hy, const std::vector<double>& s11,
                           const std::vector<double>& s22, const std::vector<double>& s12,
                           std::vector<double>& out, double sign) {
  const int nx = L.nx, ny = L.ny;
  auto cell = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      out[L.u(i, j)] += sign * ((s11[cell(i, j)] - s11[cell(i - 1, j)]) / hx +
                                (s12[L.node(i, j + 1)] - s12[L.node(i, j)]) / hy);
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out[L.v(i, j)] += sign * ((s12[L.node(i + 1, j)] - s12[L.node(i, j)]) / hx +
                                (s22[cell(i, j)] - s22[cell(i, j - 1)]) / hy);
}

class MomentumOperator {
 public:
  MomentumOperator(const Grid& g, double mass, const MomentumCoefficients& c)
      : L_{g.nx, g.ny}, hx_(g.hx()), hy_(g.hy()), mass_(mass), c_(c) {
    s11_.resize(g.cell_count());
    s22_.resize(g.cell_count());
    s12_.assign(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), 0.0);
    build_diagonal();
  }

  void apply(const std::vector<double>& x, std::vector<double>& out) {
    const int nx = L_.nx, ny = L_.ny;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * nx + i;
        const double two_mu = 2.0 * c_.mu_cell[k];
        s11_[k] = two_mu * (x[L_.u(i + 1, j)] - x[L_.u(i, j)]) / hx_;
        s22_[k] = two_mu * (x[L_.v(i, j + 1)] - x[L_.v(i, j)]) / hy_;
      }
    for (int j = 1; j < ny; ++j)
      for (int i = 1; i < nx; ++i) {
        const double d12 = 0.5 * ((x[L_.u(i, j)] - x[L_.u(i, j - 1)]) / hy_ + (x[L_.v(i, j)] - x[L_.v(i - 1, j)]) / hx_);
        s12_[L_.node(i, j)] = 2.0 * c_.mu_node[L_.node(i, j)] * d12;
      }
    for (int i = 1; i < nx; ++i) {
      s12_[L_.node(i, 0)] = c_.wall_node[L_.node(i, 0)] * x[L_.u(i, 0)];
      s12_[L_.node(i, ny)] = c_.wall_node[L_.node(i, ny)] * x[L_.u(i, ny - 1)];
    }
    for (int j = 1; j < ny; ++j) {
      s12_[L_.node(0, j)] = c_.wall_node[L_.node(0, j)] * x[L_.v(0, j)];
      s12_[L_.node(nx, j)] = c_.wall_node[L_.node(nx, j)] * x[L_.v(nx - 1, j)];
    }
    out.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = mass_ * x[k];
    add_stress_divergence(L_, hx_, hy_, s11_, s22_, s12_, out, -1.0);
  }

  void precondition(const std::vector<double>& r, std::vector<double>& z) const {
    z.resize(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) z[k] = r[k] / diag_[k];
  }

 private:
  void build_diagonal() {
    const int nx = L_.nx, ny = L_.ny;
    diag_.assign(L_.size(), mass_);
    auto cell = [nx](int i, int j) { return static_cast<std::size_t>(j) * nx + i; };
    auto node_term = [&](int i, int j, double h) {
      if (i == 0 || i == nx || j == 0 || j == ny) return std::abs(c_.wall_node[L_.node(i, j)]) / h;
      return c_.mu_node[L_.node(i, j)] / (h * h);
    };
    for (int j = 0; j < ny; ++j)
      for (int i = 1; i < nx; ++i)
        diag_[L_.u(i, j)] += 2.0 * (c_.mu_cell[cell(i, j)] + c_.mu_cell[cell(i - 1, j)]) / (hx_ * hx_) +
                             node_term(i, j, hy_) + node_term(i, j + 1, hy_);
    for (int j = 1; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        diag_[L_.v(i, j)] += 2.0 * (c_.mu_cell[cell(i, j)] + c_.mu_cell[cell(i, j - 1)]) / (hy_ * hy_) +
                             node_term(i, j, hx_) + node_term(i + 1, j, hx_);
  }

  FaceLayout L_;
  double hx_, hy_, mass_;
  const MomentumCoefficients& c_;
  std::vector<double> s11_, s22_, s12_, diag_;
};

std::vector<double> flatten(const VectorField& v) {
  std::vector<double> x(v.u_values());
  x.insert(x.end(), v.v_values().begin(), v.v_values().end());
  return x;
}

void unflatten(const std::vector<double>& x, VectorField& v) {
  const std::size_t nu = v.u_values().size();
  std::copy(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nu), v.u_values().begin());
  std::copy(x.begin() + static_cast<std::ptrdiff_t>(nu), x.end(), v.v_values().begin());
}

double relative_change(const VectorField& a, const VectorField& b) {
  VectorField d = a;
  d -= b;
  const double num = d.l2_norm();
  const double den = a.l2_norm();
  if (num == 0.0) return 0.0;
  return den > 0.0 ? num / den : std::numeric_limits<double>::infinity();
}

// Anderson mixing for the fixed-point map x -> g(x), least squares by modified Gram-Schmidt.
class AndersonMixer {
 public:
  explicit AndersonMixer(int depth) : depth_(depth) {}

  std::vector<double> next(const std::vector<double>& x, const std::vector<double>& g) {
    const std::size_t n = x.size();
    std::vector<double> f(n);
    for (std::size_t k = 0; k < n; ++k) f[k] = g[k] - x[k];
    if (depth_ <= 0) return g;
    if (!f_prev_.empty()) {
      std::vector<double> df(n), dg(n);
      for (std::size_t k = 0; k < n; ++k) {
        df[k] = f[k] - f_prev_[k];
        dg[k] = g[k] - g_prev_[k];
      }
      dF_.push_back(std::move(df));
      dG_.push_back(std::move(dg));
      if (static_cast<int>(dF_.size()) > depth_) {
        dF_.erase(dF_.begin());
        dG_.erase(dG_.begin());
      }
    }
    f_prev_ = f;
    g_prev_ = g;
    if (dF_.empty()) return g;

    for (;;) {
      const std::size_t m = dF_.size();
      std::vector<std::vector<double>> q = dF_;
      std::vector<double> r(m * m, 0.0);
      bool ok = true;
      for (std::size_t c = 0; c < m && ok; ++c) {
        const double orig = std::sqrt(dot(q[c], q[c]));
        for (std::size_t a = 0; a < c; ++a) {
          const double h = dot(q[a], q[c]);
          r[a * m + c] = h;
          for (std::size_t k = 0; k < n; ++k) q[c][k] -= h * q[a][k];
        }
        const double nn = std::sqrt(dot(q[c], q[c]));
        if (!(nn > 1e-10 * orig)) ok = false;
        r[c * m + c] = nn;
        if (ok)
          for (double& v : q[c]) v /= nn;
      }
      if (!ok) {
        dF_.erase(dF_.begin());
        dG_.erase(dG_.begin());
        if (dF_.empty()) return g;
        continue;
      }
      std::vector<double> gamma(m);
      for (std::size_t c = 0; c < m; ++c) gamma[c] = dot(q[c], f);
      for (std::size_t c = m; c-- > 0;) {
        for (std::size_t a = c + 1; a < m; ++a) gamma[c] -= r[c * m + a] * gamma[a];
        gamma[c] /= r[c * m + c];
      }
      std::vector<double> out = g;
      for (std::size_t c = 0; c < m; ++c)
        for (std::size_t k = 0; k < n; ++k) out[k] -= gamma[c] * dG_[c][k];
      return out;
    }
  }

 private:
  static double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
  }

  int depth_;
  std::vector<double> f_prev_, g_prev_;
  std::vector<std::vector<double>> dF_, dG_;
};

double max_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double a : x) m = std::max(m, std::abs(a));
  return m;
}

}  // namespace

Stepper::Stepper(const SimConfig& cfg)
    : cfg_(cfg), poisson_(cfg.grid, 0.0, 1.0), pore_(cfg.grid, 1.0 / cfg.time.dt, cfg.physics.permeability) {}

ScalarField Stepper::yield_field(const ScalarField& p_f, double t) const {
  ScalarField tau(cfg_.grid);
  for (int j = 0; j < cfg_.grid.ny; ++j)
    for (int i = 0; i < cfg_.grid.nx; ++i)
      tau(i, j) = yield_stress(lithostatic_pressure(cfg_, t, cfg_.grid.xc(i), cfg_.grid.yc(j)), p_f(i, j),
                               cfg_.rheology.q_star);
  return tau;
}

LerayResult Stepper::project(const VectorField& v_star) {
  const Grid& g = v_star.grid();
  const ScalarField div = divergence(v_star);
  std::vector<double> rhs(div.values().size());
  for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] = -div.values()[k];

  LerayResult out;
  out.psi = ScalarField(g);
  std::vector<double>& psi = out.psi.values();
  if (max_abs(rhs) > 0.0) {
    CgOptions opts;
    opts.abs_linf_tol = 0.5 * cfg_.time.poisson_tol;
    opts.max_iterations = 10 * g.cell_count();
    opts.remove_mean = true;
    ScalarField work(g);
    const CgResult res = conjugate_gradient(
        [&](const std::vector<double>& in, std::vector<double>& o) {
          work.values() = in;
          const ScalarField lap = laplacian_neumann(work);
          o.resize(in.size());
          for (std::size_t k = 0; k < in.size(); ++k) o[k] = -lap.values()[k];
        },
        [&](const std::vector<double>& in, std::vector<double>& o) { poisson_.solve(in, o); }, rhs, psi, opts);
    out.iterations = res.iterations;
  }
  out.v = v_star;
  out.v -= gradient(out.psi);
  out.v.zero_boundary_normal();
  return out;
}

LerayResult leray_project(const VectorField& v_star, double poisson_tol) {
  SimConfig cfg;
  cfg.grid = v_star.grid();
  cfg.time.poisson_tol = poisson_tol;
  Stepper stepper(cfg);
  return stepper.project(v_star);
}

SimState Stepper::momentum(const SimState& state, StepInfo* info) {
  const Grid& g = cfg_.grid;
  const double dt = cfg_.time.dt;
  const double rho = cfg_.physics.rho_s;
  const double mass = rho / dt;
  const double t1 = state.t + dt;
  const FaceLayout L{g.nx, g.ny};

  const ScalarField tau = yield_field(state.p_f, t1);
  VectorField base = state.v;
  base *= mass;
  {
    VectorField conv = convective_term_truncated(state.v, cfg_.rheology.reg_n);
    conv *= rho;
    base -= conv;
    VectorField b = body_force_field(cfg_, t1);
    b *= rho;
    base += b;
    base.zero_boundary_normal();
  }
  const std::vector<double> base_flat = flatten(base);

  VectorField w = state.v;
  ScalarField p = state.p;
  StepInfo local;
  StepInfo& inf = info ? *info : local;
  inf.picard_iterations = 0;
  inf.momentum_cg_iterations = 0;
  inf.poisson_cg_iterations = 0;
  double residual = std::numeric_limits<double>::infinity();

  CgOptions cg;
  cg.rel_l2_tol = std::max(1e-3 * cfg_.time.picard_tol, 1e-13);
  cg.max_iterations = 10 * L.size();

  AndersonMixer mixer(cfg_.time.anderson_depth);
  for (int it = 1; it <= cfg_.time.picard_max; ++it) {
    const StressState st = evaluate_stress_state(w, tau, cfg_.rheology, cfg_.slip);
    const MomentumCoefficients coef = build_coefficients(st, cfg_.rheology);

    std::vector<double> rhs = base_flat;
    {
      std::vector<double> e11(g.cell_count()), e22(g.cell_count());
      for (std::size_t k = 0; k < e11.size(); ++k) {
        e11[k] = coef.e_cell[k].xx;
        e22[k] = coef.e_cell[k].yy;
      }
      add_stress_divergence(L, g.hx(), g.hy(), e11, e22, coef.e_node, rhs, 1.0);
      const VectorField gp = gradient(p);
      const std::vector<double> gp_flat = flatten(gp);
      for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] -= gp_flat[k];
    }

    MomentumOperator op(g, mass, coef);
    std::vector<double> x = flatten(w);
    if (max_abs(rhs) == 0.0) {
      std::fill(x.begin(), x.end(), 0.0);
    } else {
      const CgResult res = conjugate_gradient([&](const auto& in, auto& o) { op.apply(in, o); },
                                              [&](const auto& in, auto& o) { op.precondition(in, o); }, rhs, x, cg);
      inf.momentum_cg_iterations += res.iterations;
    }
    VectorField v_star(g);
    unflatten(x, v_star);
    v_star.zero_boundary_normal();

    const ScalarField div_star = divergence(v_star);
    const ScalarField p_prev = p;
    LerayResult proj = project(v_star);
    inf.poisson_cg_iterations += proj.iterations;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const std::size_t k = static_cast<std::size_t>(j) * g.nx + i;
        p(i, j) += mass * proj.psi(i, j) - 2.0 * coef.mu_cell[k] * div_star(i, j);
      }

    residual = relative_change(proj.v, w);
    inf.picard_iterations = it;
    inf.picard_residual = residual;
    if (residual <= cfg_.time.picard_tol) {
      SimState next;
      next.t = t1;
      next.v = std::move(proj.v);
      next.p = std::move(p);
      next.p_f = state.p_f;
      const ScalarField div = divergence(next.v);
      inf.div_linf = div.linf_norm();
      inf.normal_zero = next.v.boundary_normal_is_zero();
      inf.cfl = next.v.linf_norm() * dt / std::min(g.hx(), g.hy());
      inf.cfl_warning = inf.cfl > 0.5;
      inf.t = t1;
      return next;
    }
    {
      std::vector<double> x_old = flatten(w), g_new = flatten(proj.v);
      const std::size_t nv = x_old.size();
      x_old.insert(x_old.end(), p_prev.values().begin(), p_prev.values().end());
      g_new.insert(g_new.end(), p.values().begin(), p.values().end());
      const std::vector<double> mixed = mixer.next(x_old, g_new);
      unflatten(std::vector<double>(mixed.begin(), mixed.begin() + static_cast<std::ptrdiff_t>(nv)), w);
      std::copy(mixed.begin() + static_cast<std::ptrdiff_t>(nv), mixed.end(), p.values().begin());
    }
  }
  throw PicardNoConvergence(cfg_.time.picard_max, residual);
}

SimState Stepper::pore_pressure(const SimState& state, double t_prev, StepInfo* info) {
  const Grid& g = cfg_.grid;
  const double dt = cfg_.time.dt;
  const double t1 = state.t;
  const double K = cfg_.physics.permeability;

  const ScalarField adv_pf = advect_scalar(state.p_f, state.v, cfg_.physics.advection);
  const ScalarField ps = lithostatic_field(cfg_, t1);
  const ScalarField adv_ps = advect_scalar(ps, state.v, cfg_.physics.advection);
  VectorField b = body_force_field(cfg_, t1);
  b.zero_boundary_normal();
  const ScalarField div_b = divergence(b);

  std::vector<double> rhs(g.cell_count());
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    rhs[k] = state.p_f.values()[k] / dt - adv_pf.values()[k] - K * cfg_.physics.rho_f * div_b.values()[k] +
             adv_ps.values()[k];
    if (cfg_.physics.include_dt_ps) rhs[k] += (ps.values()[k] - lithostatic_field(cfg_, t_prev).values()[k]) / dt;
  }

  SimState next = state;
  std::vector<double>& x = next.p_f.values();
  if (max_abs(rhs) == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
  } else {
    CgOptions opts;
    opts.rel_l2_tol = cfg_.time.poisson_tol;
    opts.max_iterations = 10 * g.cell_count();
    ScalarField work(g);
    const CgResult res = conjugate_gradient(
        [&](const std::vector<double>& in, std::vector<double>& o) {
          work.values() = in;
          const ScalarField lap = laplacian_neumann(work);
          o.resize(in.size());
          for (std::size_t k = 0; k < in.size(); ++k) o[k] = in[k] / dt - K * lap.values()[k];
        },
        [&](const std::vector<double>& in, std::vector<double>& o) { pore_.solve(in, o); }, rhs, x, opts);
    if (info) info->pore_cg_iterations = res.iterations;
  }
  return next;
}

SimState Stepper::step(const SimState& state, StepInfo* info) {
  const SimState moved = momentum(state, info);
  return pore_pressure(moved, state.t, info);
}

SimState momentum_step(const SimState& state, const SimConfig& cfg) {
  Stepper stepper(cfg);
  return stepper.momentum(state);
}

SimState pore_pressure_step(const SimState& state, const SimConfig& cfg) {
  Stepper stepper(cfg);
  SimState advanced = state;
  advanced.t = state.t + cfg.time.dt;
  return stepper.pore_pressure(advanced, state.t);
}

VectorField fluid_velocity(const SimState& state, const SimConfig& cfg) {
  const Grid& g = cfg.grid;
  const double inv_alpha = 1.0 / cfg.physics.alpha_drag;
  const double rho_f = cfg.physics.rho_f;
  const VectorField grad_pf = gradient(state.p_f);
  const VectorField b = body_force_field(cfg, state.t);
  auto phi = [&](int ia, int ja, int ib, int jb) {
    const double eff = 0.5 * ((state.p(ia, ja) - state.p_f(ia, ja)) + (state.p(ib, jb) - state.p_f(ib, jb)));
    return cfg.porosity(eff);
  };
  VectorField vf = state.v;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      vf.u(i, j) -= inv_alpha * phi(i - 1, j, i, j) * (grad_pf.u(i, j) - rho_f * b.u(i, j));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      vf.v(i, j) -= inv_alpha * phi(i, j - 1, i, j) * (grad_pf.v(i, j) - rho_f * b.v(i, j));
  vf.zero_boundary_normal();
  return vf;
}

SimState initial_state(const SimConfig& cfg, const VectorField& v0, const ScalarField& pf0) {
  if (!(v0.grid() == cfg.grid) || !(pf0.grid() == cfg.grid))
    throw std::invalid_argument("initial data grid does not match the configuration");
  Stepper stepper(cfg);
  VectorField v = v0;
  v.zero_boundary_normal();
  SimState s;
  s.t = 0.0;
  s.v = stepper.project(v).v;
  s.p = ScalarField(cfg.grid);
  s.p_f = pf0;
  return s;
}

SimState simulate(const SimConfig& cfg, const VectorField& v0, const ScalarField& pf0,
                  const std::vector<Observer>& observers) {
  cfg.validate();
  Stepper stepper(cfg);
  SimState state = initial_state(cfg, v0, pf0);
  const std::int64_t steps = cfg.step_count();
  for (std::int64_t k = 1; k <= steps; ++k) {
    StepInfo info;
    SimState next;
    try {
      next = stepper.step(state, &info);
    } catch (const std::exception& e) {
      throw SimulationError(k, e.what());
    }
    next.t = static_cast<double>(k) * cfg.time.dt;
    info.step = k;
    info.t = next.t;
    for (const Observer& obs : observers) obs(state, next, info);
    state = std::move(next);
  }
  return state;
}

SimState simulate(const SimConfig& cfg, const std::vector<Observer>& observers) {
  return simulate(cfg, initial_velocity(cfg), initial_pore_pressure(cfg), observers);
}

}  // namespace granflow
