#pragma once

// Constitutive laws of the pore-pressure-activated granular material: the
// implicit Bingham-type bulk graph, the threshold-slip boundary graph, their
// n-regularizations and the residuals that measure distance from each graph.

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace granflow {

/// Symmetric 2x2 tensor, upper triangle stored.
struct SymTensor2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  friend SymTensor2 operator+(const SymTensor2& a, const SymTensor2& b) {
    return {a.xx + b.xx, a.yy + b.yy, a.xy + b.xy};
  }
  friend SymTensor2 operator-(const SymTensor2& a, const SymTensor2& b) {
    return {a.xx - b.xx, a.yy - b.yy, a.xy - b.xy};
  }
  friend SymTensor2 operator*(double s, const SymTensor2& a) {
    return {s * a.xx, s * a.yy, s * a.xy};
  }
  friend bool operator==(const SymTensor2&, const SymTensor2&) = default;
};

/// A:B, counting the off-diagonal entry twice.
inline double contract(const SymTensor2& a, const SymTensor2& b) {
  return a.xx * b.xx + a.yy * b.yy + 2.0 * a.xy * b.xy;
}

/// Frobenius norm.
inline double norm(const SymTensor2& a) { return std::sqrt(contract(a, a)); }

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(const Vec2& a, const Vec2& b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, const Vec2& a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// Bulk material constants. Defaults follow the normalized setting 2*nu_star = q_star = 1.
struct RheologyParams {
  double nu_star = 0.5;
  double delta_star = 0.0;
  double q_star = 1.0;
  double q_exponent = 2.0;
  std::int64_t reg_n = 100;

  /// Throws std::invalid_argument naming the first violated bound.
  void validate() const;
};

/// Threshold-slip boundary constants.
struct SlipParams {
  double s_star = 0.0;
  double beta_star = 0.0;
  double gamma_star = 1.0;

  void validate() const;
};

/// S = Z + V with Z the plastic (yield) part and V the activated viscous part.
struct StressSplit {
  SymTensor2 Z;
  SymTensor2 V;
  SymTensor2 S;
};

/// tau = q_star * (p_s - p_f)^+.
double yield_stress(double p_s, double p_f, double q_star);

/// Z_n = tau * D / (|D| + 1/n).
SymTensor2 plastic_stress_reg(const SymTensor2& D, double tau, std::int64_t reg_n);

/// 2 nu |D|^{q-2} (|D| - delta)^+ D/|D|, zero for |D| <= delta.
SymTensor2 viscous_stress_activated(const SymTensor2& D, double nu_star, double delta_star,
                                    double q_exponent);

/// (|Z| - tau)^+ + | |D| Z - tau D |; zero exactly on the bulk graph.
double bulk_implicit_residual(const SymTensor2& Z, const SymTensor2& D, double tau);

/// s_n(v) = s_star v/(|v| + 1/n) + gamma_star (|v| - beta_star)^+ v/|v|.
Vec2 slip_traction_reg(const Vec2& v_tau, const SlipParams& slip, std::int64_t reg_n);

/// (|z| - s_star)^+ + | |v| z - s_star v |; zero exactly on the boundary graph.
double slip_implicit_residual(const Vec2& z, const Vec2& v_tau, double s_star);

StressSplit total_stress(const SymTensor2& D, double p_f, double p_s, const RheologyParams& params);

/// Same as total_stress but with the yield stress supplied directly.
StressSplit total_stress_tau(const SymTensor2& D, double tau, const RheologyParams& params);

/// Scalar magnitude of the regularized slip traction for a tangential speed u >= 0.
double slip_traction_magnitude(double speed, const SlipParams& slip, std::int64_t reg_n);

/// Secant coefficient mu with viscous_stress_activated(D) = 2 mu D; also defined at D = 0.
double viscous_secant(double d_norm, double nu_star, double delta_star, double q_exponent);

}  // namespace granflow
