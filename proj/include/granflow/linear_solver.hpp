#pragma once

// Preconditioned conjugate gradients for the symmetric Poisson and
// Helmholtz-type systems of the projection scheme.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace granflow {

class PoissonNoConvergence : public std::runtime_error {
 public:
  PoissonNoConvergence(std::size_t iterations, double residual)
      : std::runtime_error("linear solve did not converge after " + std::to_string(iterations) +
                           " iterations (residual " + std::to_string(residual) + ")"),
        iterations_(iterations),
        residual_(residual) {}

  std::size_t iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

struct CgOptions {
  /// Stop once max |r_i| <= abs_linf_tol (ignored when <= 0).
  double abs_linf_tol = 0.0;
  /// Stop once ||r||_2 <= rel_l2_tol * ||b||_2 (ignored when <= 0).
  double rel_l2_tol = 0.0;
  std::size_t max_iterations = 1000;
  /// Operator is singular with constant null space; keep the iterates mean-free.
  bool remove_mean = false;
};

struct CgResult {
  std::size_t iterations = 0;
  double residual_linf = 0.0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double linf(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline void remove_mean(std::vector<double>& a) {
  if (a.empty()) return;
  const double m = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(a.size());
  for (double& x : a) x -= m;
}

}  // namespace detail

/// Solves A x = b starting from the given x. `apply(in, out)` computes out = A in;
/// `precondition(in, out)` computes out = M^{-1} in for an SPD M.
/// Throws PoissonNoConvergence when max_iterations is exceeded.
template <class Apply, class Precondition>
CgResult conjugate_gradient(Apply&& apply, Precondition&& precondition, std::vector<double> b,
                            std::vector<double>& x, const CgOptions& opts) {
  const std::size_t n = b.size();
  if (opts.remove_mean) detail::remove_mean(b);
  const double b_norm = std::sqrt(detail::dot(b, b));

  std::vector<double> r(n), z(n), p(n), ap(n);
  auto converged = [&](const std::vector<double>& res) {
    bool ok = true;
    bool any = false;
    if (opts.abs_linf_tol > 0.0) {
      any = true;
      ok = ok && detail::linf(res) <= opts.abs_linf_tol;
    }
    if (opts.rel_l2_tol > 0.0) {
      any = true;
      ok = ok && std::sqrt(detail::dot(res, res)) <= opts.rel_l2_tol * b_norm;
    }
    return any ? ok : true;
  };
  auto true_residual = [&]() {
    apply(x, ap);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - ap[k];
    if (opts.remove_mean) detail::remove_mean(r);
  };

  CgResult result;
  true_residual();
  if (b_norm == 0.0 && detail::linf(r) == 0.0) return result;

  // Restarted from the true residual whenever the recursive one claims convergence
  // but the true one disagrees (round-off drift).
  while (result.iterations < opts.max_iterations) {
    if (converged(r)) break;
    precondition(r, z);
    if (opts.remove_mean) detail::remove_mean(z);
    p = z;
    double rz = detail::dot(r, z);
    while (result.iterations < opts.max_iterations) {
      apply(p, ap);
      const double pap = detail::dot(p, ap);
      if (!(pap > 0.0)) {
        ++result.iterations;
        break;
      }
      const double alpha = rz / pap;
      for (std::size_t k = 0; k < n; ++k) {
        x[k] += alpha * p[k];
        r[k] -= alpha * ap[k];
      }
      ++result.iterations;
      if (converged(r)) break;
      precondition(r, z);
      if (opts.remove_mean) detail::remove_mean(z);
      const double rz_next = detail::dot(r, z);
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
    }
    true_residual();
    if (converged(r)) break;
    if (detail::linf(r) == 0.0) break;
  }
  if (opts.remove_mean) detail::remove_mean(x);
  result.residual_linf = detail::linf(r);
  if (!converged(r)) throw PoissonNoConvergence(result.iterations, result.residual_linf);
  return result;
}

}  // namespace granflow
