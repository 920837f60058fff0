#pragma once

// Storage for cell-centred scalars, MAC-staggered velocities and cell-centred
// symmetric tensors on an axis-aligned 2D box.
//
// Index conventions (cell (i, j) spans [i hx, (i+1) hx] x [j hy, (j+1) hy]):
//   ScalarField       value(i, j)      i in [0, nx),  j in [0, ny)
//   VectorField::u    x-velocity on vertical faces at (i hx, (j+1/2) hy),
//                     i in [0, nx],  j in [0, ny)
//   VectorField::v    y-velocity on horizontal faces at ((i+1/2) hx, j hy),
//                     i in [0, nx),  j in [0, ny]
// Boundary normal faces are u(0, j), u(nx, j), v(i, 0), v(i, ny).

#include <cstddef>
#include <functional>
#include <vector>

#include "granflow/rheology.hpp"

namespace granflow {

struct Grid {
  int nx = 32;
  int ny = 32;
  double lx = 1.0;
  double ly = 1.0;

  Grid() = default;
  Grid(int nx_, int ny_, double lx_, double ly_);

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }
  double area() const { return lx * ly; }
  std::size_t cell_count() const { return static_cast<std::size_t>(nx) * ny; }

  double xc(int i) const { return (i + 0.5) * hx(); }
  double yc(int j) const { return (j + 0.5) * hy(); }

  /// Throws std::invalid_argument on nx, ny < 4 or non-positive lengths.
  void validate() const;

  friend bool operator==(const Grid&, const Grid&) = default;
};

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double fill = 0.0);

  const Grid& grid() const { return grid_; }
  double& operator()(int i, int j) { return values_[index(i, j)]; }
  double operator()(int i, int j) const { return values_[index(i, j)]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * grid_.nx + i; }

  static ScalarField sample(const Grid& grid, const std::function<double(double, double)>& f);

  double mean() const;
  double l2_norm() const;    // cell-area weighted
  double linf_norm() const;
  bool all_finite() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const Grid& grid);

  const Grid& grid() const { return grid_; }

  double& u(int i, int j) { return u_[u_index(i, j)]; }
  double u(int i, int j) const { return u_[u_index(i, j)]; }
  double& v(int i, int j) { return v_[v_index(i, j)]; }
  double v(int i, int j) const { return v_[v_index(i, j)]; }

  std::vector<double>& u_values() { return u_; }
  const std::vector<double>& u_values() const { return u_; }
  std::vector<double>& v_values() { return v_; }
  const std::vector<double>& v_values() const { return v_; }

  std::size_t u_index(int i, int j) const { return static_cast<std::size_t>(j) * (grid_.nx + 1) + i; }
  std::size_t v_index(int i, int j) const { return static_cast<std::size_t>(j) * grid_.nx + i; }

  /// Samples f at face centres (u from f(x,y).x on vertical faces, v from .y on horizontal ones).
  static VectorField sample(const Grid& grid, const std::function<Vec2(double, double)>& f);

  /// Discretely divergence-free field from a node-based streamfunction psi(x, y).
  /// Normal boundary fluxes vanish when psi is zero on the boundary.
  static VectorField from_streamfunction(const Grid& grid,
                                         const std::function<double(double, double)>& psi);

  void zero_boundary_normal();
  bool boundary_normal_is_zero() const;

  double l2_norm() const;     // sum over interior faces weighted by cell area
  double linf_norm() const;   // max component magnitude over all faces
  double dot(const VectorField& other) const;  // interior faces, cell-area weighted
  bool all_finite() const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);

  /// Velocity interpolated to cell centres.
  Vec2 cell_average(int i, int j) const;

 private:
  Grid grid_;
  std::vector<double> u_;
  std::vector<double> v_;
};

class SymTensorField {
 public:
  SymTensorField() = default;
  explicit SymTensorField(const Grid& grid);

  const Grid& grid() const { return grid_; }
  SymTensor2& operator()(int i, int j) { return values_[static_cast<std::size_t>(j) * grid_.nx + i]; }
  const SymTensor2& operator()(int i, int j) const {
    return values_[static_cast<std::size_t>(j) * grid_.nx + i];
  }
  std::vector<SymTensor2>& values() { return values_; }
  const std::vector<SymTensor2>& values() const { return values_; }

  /// Cell-wise Frobenius norms.
  ScalarField magnitude() const;

 private:
  Grid grid_;
  std::vector<SymTensor2> values_;
};

}  // namespace granflow
