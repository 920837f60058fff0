#include "granflow/discretization.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <cstdint>

namespace granflow {

namespace {

double wall_orientation(WallSide side) {
  return (side == WallSide::bottom || side == WallSide::left) ? 1.0 : -1.0;
}

}  // namespace

WallNode wall_balance(WallNode node, const SymTensor2& diag, double tau, const RheologyParams& rheology,
                      const SlipParams& slip) {
  const double h = node.h_normal;
  const double speed0 = std::abs(node.u0);
  const auto bulk_shear = [&](double d12) {
    return total_stress_tau({diag.xx, diag.yy, d12}, tau, rheology).S.xy;
  };
  const auto slip_of = [&](double w) { return slip_traction_magnitude(w, slip, rheology.reg_n); };

  if (speed0 == 0.0) {
    const SymTensor2 d0{diag.xx, diag.yy, 0.0};
    const double n = static_cast<double>(rheology.reg_n);
    const double mu0 = 0.5 * tau / (norm(d0) + 1.0 / n) +
                       viscous_secant(norm(d0), rheology.nu_star, rheology.delta_star, rheology.q_exponent);
    const double kappa0 = slip.s_star * n + (slip.beta_star == 0.0 ? slip.gamma_star : 0.0);
    const double a = 2.0 * mu0 / h;
    node.slip_speed = 0.0;
    node.traction = 0.0;
    node.gamma_eff = (kappa0 > 0.0 && a > 0.0) ? kappa0 * a / (a + kappa0) : 0.0;
    return node;
  }

  const auto F = [&](double w) { return bulk_shear((speed0 - w) / h) - slip_of(w); };
  const double f_lo = F(0.0);
  const double f_hi = F(speed0);
  double w;
  if (f_hi >= 0.0) {
    w = speed0;
  } else if (f_lo <= 0.0) {
    w = 0.0;
  } else {
    std::uintmax_t max_iter = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(F, 0.0, speed0, f_lo, f_hi,
                                                           boost::math::tools::eps_tolerance<double>(50),
                                                           max_iter);
    w = 0.5 * (lo + hi);
  }
  node.slip_speed = w;
  node.traction = slip_of(w);
  node.gamma_eff = node.traction / speed0;
  return node;
}

StressState evaluate_stress_state(const VectorField& v, const ScalarField& tau,
                                  const RheologyParams& rheology, const SlipParams& slip) {
  const Grid& g = v.grid();
  const int nx = g.nx, ny = g.ny;
  const double hx = g.hx(), hy = g.hy();

  StressState st;
  st.grid = g;
  st.tau = tau;
  st.D = SymTensorField(g);
  st.Z = SymTensorField(g);
  st.V = SymTensorField(g);
  const std::size_t n_nodes = static_cast<std::size_t>(nx + 1) * (ny + 1);
  st.D_node.assign(n_nodes, {});
  st.Z_node.assign(n_nodes, {});
  st.V_node.assign(n_nodes, {});
  st.tau_node.assign(n_nodes, 0.0);

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      st.D(i, j).xx = (v.u(i + 1, j) - v.u(i, j)) / hx;
      st.D(i, j).yy = (v.v(i, j + 1) - v.v(i, j)) / hy;
    }

  for (int j = 1; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const std::size_t k = st.node_index(i, j);
      SymTensor2& d = st.D_node[k];
      d.xy = 0.5 * ((v.u(i, j) - v.u(i, j - 1)) / hy + (v.v(i, j) - v.v(i - 1, j)) / hx);
      d.xx = 0.25 * (st.D(i - 1, j - 1).xx + st.D(i, j - 1).xx + st.D(i - 1, j).xx + st.D(i, j).xx);
      d.yy = 0.25 * (st.D(i - 1, j - 1).yy + st.D(i, j - 1).yy + st.D(i - 1, j).yy + st.D(i, j).yy);
      st.tau_node[k] = 0.25 * (tau(i - 1, j - 1) + tau(i, j - 1) + tau(i - 1, j) + tau(i, j));
    }

  auto add_wall = [&](WallSide side, int i, int j, int ia, int ja, int ib, int jb, double u0, double hn,
                      double ht) {
    const std::size_t k = st.node_index(i, j);
    SymTensor2 diag{0.5 * (st.D(ia, ja).xx + st.D(ib, jb).xx), 0.5 * (st.D(ia, ja).yy + st.D(ib, jb).yy), 0.0};
    const double tau_w = 0.5 * (tau(ia, ja) + tau(ib, jb));
    WallNode node;
    node.i = i;
    node.j = j;
    node.side = side;
    node.h_normal = hn;
    node.h_tangent = ht;
    node.u0 = u0;
    node = wall_balance(node, diag, tau_w, rheology, slip);
    const double sgn = u0 > 0.0 ? 1.0 : (u0 < 0.0 ? -1.0 : 0.0);
    diag.xy = wall_orientation(side) * sgn * (std::abs(u0) - node.slip_speed) / hn;
    st.D_node[k] = diag;
    st.tau_node[k] = tau_w;
    st.walls.push_back(node);
  };
  for (int i = 1; i < nx; ++i) {
    add_wall(WallSide::bottom, i, 0, i - 1, 0, i, 0, v.u(i, 0), hy, hx);
    add_wall(WallSide::top, i, ny, i - 1, ny - 1, i, ny - 1, v.u(i, ny - 1), hy, hx);
  }
  for (int j = 1; j < ny; ++j) {
    add_wall(WallSide::left, 0, j, 0, j - 1, 0, j, v.v(0, j), hx, hy);
    add_wall(WallSide::right, nx, j, nx - 1, j - 1, nx - 1, j, v.v(nx - 1, j), hx, hy);
  }

  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      SymTensor2& d = st.D(i, j);
      d.xy = 0.25 * (st.D_node[st.node_index(i, j)].xy + st.D_node[st.node_index(i + 1, j)].xy +
                     st.D_node[st.node_index(i, j + 1)].xy + st.D_node[st.node_index(i + 1, j + 1)].xy);
      const StressSplit s = total_stress_tau(d, tau(i, j), rheology);
      st.Z(i, j) = s.Z;
      st.V(i, j) = s.V;
    }
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const StressSplit s = total_stress_tau(st.D_node[k], st.tau_node[k], rheology);
    st.Z_node[k] = s.Z;
    st.V_node[k] = s.V;
  }
  return st;
}

DissipationTerms dissipation_terms(const StressState& st) {
  const Grid& g = st.grid;
  const double area = g.cell_area();
  DissipationTerms out;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const SymTensor2& d = st.D(i, j);
      const SymTensor2& z = st.Z(i, j);
      const SymTensor2& v = st.V(i, j);
      out.plastic += (z.xx * d.xx + z.yy * d.yy) * area;
      out.viscous += (v.xx * d.xx + v.yy * d.yy) * area;
      out.strain_sq += (d.xx * d.xx + d.yy * d.yy) * area;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const std::size_t k = st.node_index(i, j);
      const SymTensor2& d = st.D_node[k];
      out.plastic += 2.0 * st.Z_node[k].xy * d.xy * area;
      out.viscous += 2.0 * st.V_node[k].xy * d.xy * area;
      out.strain_sq += 2.0 * d.xy * d.xy * area;
    }
  out.stress_power = out.plastic + out.viscous;
  for (const WallNode& w : st.walls) out.slip += w.traction * std::abs(w.u0) * w.h_tangent;
  return out;
}

}  // namespace granflow
