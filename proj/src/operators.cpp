#include "granflow/operators.hpp"

#include <cmath>

namespace granflow {

SymTensorField sym_gradient(const VectorField& v) {
  const Grid& g = v.grid();
  const double hx = g.hx(), hy = g.hy();
  const int nx = g.nx, ny = g.ny;

  // Cell-centred velocity components used for the cross derivatives.
  ScalarField uc(g), vc(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 c = v.cell_average(i, j);
      uc(i, j) = c.x;
      vc(i, j) = c.y;
    }

  auto d_dy = [&](const ScalarField& f, int i, int j) {
    if (j == 0) return (-3.0 * f(i, 0) + 4.0 * f(i, 1) - f(i, 2)) / (2.0 * hy);
    if (j == ny - 1) return (3.0 * f(i, ny - 1) - 4.0 * f(i, ny - 2) + f(i, ny - 3)) / (2.0 * hy);
    return (f(i, j + 1) - f(i, j - 1)) / (2.0 * hy);
  };
  auto d_dx = [&](const ScalarField& f, int i, int j) {
    if (i == 0) return (-3.0 * f(0, j) + 4.0 * f(1, j) - f(2, j)) / (2.0 * hx);
    if (i == nx - 1) return (3.0 * f(nx - 1, j) - 4.0 * f(nx - 2, j) + f(nx - 3, j)) / (2.0 * hx);
    return (f(i + 1, j) - f(i - 1, j)) / (2.0 * hx);
  };

  SymTensorField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      SymTensor2& d = out(i, j);
      d.xx = (v.u(i + 1, j) - v.u(i, j)) / hx;
      d.yy = (v.v(i, j + 1) - v.v(i, j)) / hy;
      d.xy = 0.5 * (d_dy(uc, i, j) + d_dx(vc, i, j));
    }
  return out;
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  const double hx = g.hx(), hy = g.hy();
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = (v.u(i + 1, j) - v.u(i, j)) / hx + (v.v(i, j + 1) - v.v(i, j)) / hy;
  return out;
}

VectorField gradient(const ScalarField& s) {
  const Grid& g = s.grid();
  const double hx = g.hx(), hy = g.hy();
  VectorField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) out.u(i, j) = (s(i, j) - s(i - 1, j)) / hx;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.v(i, j) = (s(i, j) - s(i, j - 1)) / hy;
  return out;
}

ScalarField laplacian_neumann(const ScalarField& s) {
  const Grid& g = s.grid();
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double c = s(i, j);
      double acc = 0.0;
      if (i > 0) acc += (s(i - 1, j) - c) * ihx2;
      if (i < g.nx - 1) acc += (s(i + 1, j) - c) * ihx2;
      if (j > 0) acc += (s(i, j - 1) - c) * ihy2;
      if (j < g.ny - 1) acc += (s(i, j + 1) - c) * ihy2;
      out(i, j) = acc;
    }
  return out;
}

ScalarField advect_scalar(const ScalarField& s, const VectorField& v, AdvectionScheme scheme) {
  const Grid& g = s.grid();
  const double hx = g.hx(), hy = g.hy();
  const int nx = g.nx, ny = g.ny;
  // Reflected ghosts: one-sided differences towards the wall vanish.
  auto at = [&](int i, int j) {
    i = i < 0 ? 0 : (i >= nx ? nx - 1 : i);
    j = j < 0 ? 0 : (j >= ny ? ny - 1 : j);
    return s(i, j);
  };
  ScalarField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Vec2 c = v.cell_average(i, j);
      double sx, sy;
      if (scheme == AdvectionScheme::upwind) {
        sx = c.x > 0.0 ? (at(i, j) - at(i - 1, j)) / hx : (at(i + 1, j) - at(i, j)) / hx;
        sy = c.y > 0.0 ? (at(i, j) - at(i, j - 1)) / hy : (at(i, j + 1) - at(i, j)) / hy;
      } else {
        sx = (at(i + 1, j) - at(i - 1, j)) / (2.0 * hx);
        sy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * hy);
        if (i == 0 || i == nx - 1) sx *= 2.0;  // one cell apart after reflection
        if (j == 0 || j == ny - 1) sy *= 2.0;
      }
      out(i, j) = c.x * sx + c.y * sy;
    }
  return out;
}

double cutoff_gn(double u, double n) {
  const double a = std::abs(u);
  if (a <= n) return 1.0;
  if (a >= 2.0 * n) return 0.0;
  const double s = (a - n) / n;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

double cutoff_gn_derivative(double u, double n) {
  const double a = std::abs(u);
  if (a <= n || a >= 2.0 * n) return 0.0;
  const double s = (a - n) / n;
  const double d = 6.0 * s * (s - 1.0) / n;
  return u < 0.0 ? -d : d;
}

namespace {

// Face-wise |v|^2 with the tangential partner averaged from the four neighbours.
double speed_sq_at_u_face(const VectorField& v, int i, int j) {
  const Grid& g = v.grid();
  double vy = 0.0;
  int count = 0;
  for (int di : {-1, 0})
    for (int dj : {0, 1}) {
      const int ii = i + di;
      if (ii < 0 || ii >= g.nx) continue;
      vy += v.v(ii, j + dj);
      ++count;
    }
  vy = count ? vy / count : 0.0;
  return v.u(i, j) * v.u(i, j) + vy * vy;
}

double speed_sq_at_v_face(const VectorField& v, int i, int j) {
  const Grid& g = v.grid();
  double ux = 0.0;
  int count = 0;
  for (int di : {0, 1})
    for (int dj : {-1, 0}) {
      const int jj = j + dj;
      if (jj < 0 || jj >= g.ny) continue;
      ux += v.u(i + di, jj);
      ++count;
    }
  ux = count ? ux / count : 0.0;
  return v.v(i, j) * v.v(i, j) + ux * ux;
}

}  // namespace

VectorField convective_term(const VectorField& v) {
  const Grid& g = v.grid();
  const double hx = g.hx(), hy = g.hy();
  const int nx = g.nx, ny = g.ny;

  // u at node (i, j) for 0 <= i <= nx, 0 <= j <= ny; wall rows take the adjacent value.
  auto u_node = [&](int i, int j) {
    if (j == 0) return v.u(i, 0);
    if (j == ny) return v.u(i, ny - 1);
    return 0.5 * (v.u(i, j - 1) + v.u(i, j));
  };
  auto v_node = [&](int i, int j) {
    if (i == 0) return v.v(0, j);
    if (i == nx) return v.v(nx - 1, j);
    return 0.5 * (v.v(i - 1, j) + v.v(i, j));
  };
  auto uc = [&](int i, int j) { return 0.5 * (v.u(i, j) + v.u(i + 1, j)); };
  auto vc = [&](int i, int j) { return 0.5 * (v.v(i, j) + v.v(i, j + 1)); };

  VectorField out(g);
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i) {
      const double fxx = (uc(i, j) * uc(i, j) - uc(i - 1, j) * uc(i - 1, j)) / hx;
      const double fxy = (u_node(i, j + 1) * v_node(i, j + 1) - u_node(i, j) * v_node(i, j)) / hy;
      out.u(i, j) = fxx + fxy;
    }
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double fxy = (u_node(i + 1, j) * v_node(i + 1, j) - u_node(i, j) * v_node(i, j)) / hx;
      const double fyy = (vc(i, j) * vc(i, j) - vc(i, j - 1) * vc(i, j - 1)) / hy;
      out.v(i, j) = fxy + fyy;
    }
  return out;
}

VectorField convective_term_truncated(const VectorField& v, std::int64_t reg_n) {
  const Grid& g = v.grid();
  const double n = static_cast<double>(reg_n);
  VectorField out = convective_term(v);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) out.u(i, j) *= cutoff_gn(speed_sq_at_u_face(v, i, j), n);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.v(i, j) *= cutoff_gn(speed_sq_at_v_face(v, i, j), n);
  return out;
}

}  // namespace granflow
