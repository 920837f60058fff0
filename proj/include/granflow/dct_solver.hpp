#pragma once

// Direct solver for (a - c L) x = f on cell-centred data, where L is the
// five-point Neumann Laplacian. The operator is diagonal in the DCT-II basis.

#include <memory>
#include <vector>

#include "granflow/fields.hpp"

namespace granflow {

class DctSolver {
 public:
  /// a >= 0, c > 0. With a == 0 the constant mode is dropped (mean-free result).
  DctSolver(const Grid& grid, double a, double c);
  ~DctSolver();
  DctSolver(DctSolver&&) noexcept;
  DctSolver& operator=(DctSolver&&) noexcept;
  DctSolver(const DctSolver&) = delete;
  DctSolver& operator=(const DctSolver&) = delete;

  void solve(const std::vector<double>& f, std::vector<double>& x) const;

  const Grid& grid() const { return grid_; }

 private:
  struct Plans;
  Grid grid_;
  std::vector<double> inverse_symbol_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace granflow
