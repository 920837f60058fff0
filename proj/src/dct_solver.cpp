#include "granflow/dct_solver.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace granflow {

namespace {
// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct DctSolver::Plans {
  double* buffer = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  Plans(int nx, int ny) {
    std::lock_guard lock(planner_mutex());
    buffer = fftw_alloc_real(static_cast<std::size_t>(nx) * ny);
    if (buffer == nullptr) throw std::bad_alloc();
    forward = fftw_plan_r2r_2d(ny, nx, buffer, buffer, FFTW_REDFT10, FFTW_REDFT10, FFTW_ESTIMATE);
    backward = fftw_plan_r2r_2d(ny, nx, buffer, buffer, FFTW_REDFT01, FFTW_REDFT01, FFTW_ESTIMATE);
    if (forward == nullptr || backward == nullptr) throw std::runtime_error("fftw planning failed");
  }

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
    fftw_free(buffer);
  }
};

DctSolver::DctSolver(const Grid& grid, double a, double c)
    : grid_(grid), plans_(std::make_unique<Plans>(grid.nx, grid.ny)) {
  if (!(a >= 0.0) || !(c > 0.0)) throw std::invalid_argument("DctSolver: need a >= 0 and c > 0");
  const int nx = grid.nx, ny = grid.ny;
  const double ihx2 = 1.0 / (grid.hx() * grid.hx()), ihy2 = 1.0 / (grid.hy() * grid.hy());
  const double scale = 1.0 / (4.0 * nx * ny);
  inverse_symbol_.resize(grid.cell_count());
  for (int l = 0; l < ny; ++l)
    for (int k = 0; k < nx; ++k) {
      using std::numbers::pi;
      const double lam = (2.0 - 2.0 * std::cos(pi * k / nx)) * ihx2 + (2.0 - 2.0 * std::cos(pi * l / ny)) * ihy2;
      const double symbol = a + c * lam;
      inverse_symbol_[static_cast<std::size_t>(l) * nx + k] = symbol > 0.0 ? scale / symbol : 0.0;
    }
}

DctSolver::~DctSolver() = default;
DctSolver::DctSolver(DctSolver&&) noexcept = default;
DctSolver& DctSolver::operator=(DctSolver&&) noexcept = default;

void DctSolver::solve(const std::vector<double>& f, std::vector<double>& x) const {
  const std::size_t n = grid_.cell_count();
  double* buf = plans_->buffer;
  std::copy(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(n), buf);
  fftw_execute(plans_->forward);
  for (std::size_t k = 0; k < n; ++k) buf[k] *= inverse_symbol_[k];
  fftw_execute(plans_->backward);
  x.assign(buf, buf + n);
}

}  // namespace granflow
