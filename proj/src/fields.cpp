#include "granflow/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace granflow {

Grid::Grid(int nx_, int ny_, double lx_, double ly_) : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
  validate();
}

void Grid::validate() const {
  if (nx < 4 || ny < 4) throw std::invalid_argument("grid: nx and ny must be >= 4");
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("grid: lx and ly must be > 0");
}

ScalarField::ScalarField(const Grid& grid, double fill) : grid_(grid), values_(grid.cell_count(), fill) {}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out(i, j) = f(grid.xc(i), grid.yc(j));
  return out;
}

double ScalarField::mean() const {
  if (values_.empty()) return 0.0;
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double ScalarField::l2_norm() const {
  double s = 0.0;
  for (double x : values_) s += x * x;
  return std::sqrt(s * grid_.cell_area());
}

double ScalarField::linf_norm() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

VectorField::VectorField(const Grid& grid)
    : grid_(grid),
      u_(static_cast<std::size_t>(grid.nx + 1) * grid.ny, 0.0),
      v_(static_cast<std::size_t>(grid.nx) * (grid.ny + 1), 0.0) {}

VectorField VectorField::sample(const Grid& grid, const std::function<Vec2(double, double)>& f) {
  VectorField out(grid);
  const double hx = grid.hx(), hy = grid.hy();
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i) out.u(i, j) = f(i * hx, (j + 0.5) * hy).x;
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out.v(i, j) = f((i + 0.5) * hx, j * hy).y;
  return out;
}

VectorField VectorField::from_streamfunction(const Grid& grid,
                                             const std::function<double(double, double)>& psi) {
  const double hx = grid.hx(), hy = grid.hy();
  std::vector<double> nodes(static_cast<std::size_t>(grid.nx + 1) * (grid.ny + 1));
  auto node = [&](int i, int j) -> double& { return nodes[static_cast<std::size_t>(j) * (grid.nx + 1) + i]; };
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i) node(i, j) = psi(i * hx, j * hy);

  VectorField out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i <= grid.nx; ++i) out.u(i, j) = (node(i, j + 1) - node(i, j)) / hy;
  for (int j = 0; j <= grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) out.v(i, j) = -(node(i + 1, j) - node(i, j)) / hx;
  return out;
}

void VectorField::zero_boundary_normal() {
  for (int j = 0; j < grid_.ny; ++j) {
    u(0, j) = 0.0;
    u(grid_.nx, j) = 0.0;
  }
  for (int i = 0; i < grid_.nx; ++i) {
    v(i, 0) = 0.0;
    v(i, grid_.ny) = 0.0;
  }
}

bool VectorField::boundary_normal_is_zero() const {
  for (int j = 0; j < grid_.ny; ++j)
    if (u(0, j) != 0.0 || u(grid_.nx, j) != 0.0) return false;
  for (int i = 0; i < grid_.nx; ++i)
    if (v(i, 0) != 0.0 || v(i, grid_.ny) != 0.0) return false;
  return true;
}

double VectorField::dot(const VectorField& other) const {
  double s = 0.0;
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 1; i < grid_.nx; ++i) s += u(i, j) * other.u(i, j);
  for (int j = 1; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i) s += v(i, j) * other.v(i, j);
  return s * grid_.cell_area();
}

double VectorField::l2_norm() const { return std::sqrt(dot(*this)); }

double VectorField::linf_norm() const {
  double m = 0.0;
  for (double x : u_) m = std::max(m, std::abs(x));
  for (double x : v_) m = std::max(m, std::abs(x));
  return m;
}

bool VectorField::all_finite() const {
  auto finite = [](double x) { return std::isfinite(x); };
  return std::all_of(u_.begin(), u_.end(), finite) && std::all_of(v_.begin(), v_.end(), finite);
}

VectorField& VectorField::operator+=(const VectorField& o) {
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] += o.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  for (std::size_t k = 0; k < u_.size(); ++k) u_[k] -= o.u_[k];
  for (std::size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (double& x : u_) x *= s;
  for (double& x : v_) x *= s;
  return *this;
}

Vec2 VectorField::cell_average(int i, int j) const {
  return {0.5 * (u(i, j) + u(i + 1, j)), 0.5 * (v(i, j) + v(i, j + 1))};
}

SymTensorField::SymTensorField(const Grid& grid) : grid_(grid), values_(grid.cell_count()) {}

ScalarField SymTensorField::magnitude() const {
  ScalarField out(grid_);
  for (std::size_t k = 0; k < values_.size(); ++k) out.values()[k] = norm(values_[k]);
  return out;
}

}  // namespace granflow
