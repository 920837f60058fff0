#include "granflow/rheology.hpp"

#include <algorithm>
#include <string>

namespace granflow {

namespace {

constexpr double kPowerLawFloor = 1e-14;

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void RheologyParams::validate() const {
  require(nu_star > 0.0, "rheology.nu_star must be > 0");
  require(delta_star >= 0.0, "rheology.delta_star must be >= 0");
  require(q_star >= 0.0, "rheology.q_star must be >= 0");
  require(q_exponent > 1.0, "rheology.q_exponent must be > 1");
  require(reg_n >= 1, "rheology.reg_n must be >= 1");
}

void SlipParams::validate() const {
  require(s_star >= 0.0, "slip.s_star must be >= 0");
  require(beta_star >= 0.0, "slip.beta_star must be >= 0");
  require(gamma_star >= 0.0, "slip.gamma_star must be >= 0");
}

double yield_stress(double p_s, double p_f, double q_star) {
  return q_star * positive_part(p_s - p_f);
}

SymTensor2 plastic_stress_reg(const SymTensor2& D, double tau, std::int64_t reg_n) {
  const double scale = tau / (norm(D) + 1.0 / static_cast<double>(reg_n));
  return scale * D;
}

double viscous_secant(double d_norm, double nu_star, double delta_star, double q_exponent) {
  const double excess = positive_part(d_norm - delta_star);
  if (excess == 0.0) return 0.0;
  // d_norm > delta_star >= 0 here, so the division is safe; the floor only
  // matters for q < 2 with delta_star = 0 where |D|^{q-2} blows up at 0.
  const double prefactor =
      q_exponent == 2.0 ? 1.0 : std::pow(std::max(d_norm, kPowerLawFloor), q_exponent - 2.0);
  return nu_star * prefactor * excess / d_norm;
}

SymTensor2 viscous_stress_activated(const SymTensor2& D, double nu_star, double delta_star,
                                    double q_exponent) {
  return (2.0 * viscous_secant(norm(D), nu_star, delta_star, q_exponent)) * D;
}

double bulk_implicit_residual(const SymTensor2& Z, const SymTensor2& D, double tau) {
  return positive_part(norm(Z) - tau) + norm(norm(D) * Z - tau * D);
}

Vec2 slip_traction_reg(const Vec2& v_tau, const SlipParams& slip, std::int64_t reg_n) {
  const double speed = norm(v_tau);
  if (speed == 0.0) return {};
  return (slip_traction_magnitude(speed, slip, reg_n) / speed) * v_tau;
}

double slip_traction_magnitude(double speed, const SlipParams& slip, std::int64_t reg_n) {
  if (speed <= 0.0) return 0.0;
  return slip.s_star * speed / (speed + 1.0 / static_cast<double>(reg_n)) +
         slip.gamma_star * positive_part(speed - slip.beta_star);
}

double slip_implicit_residual(const Vec2& z, const Vec2& v_tau, double s_star) {
  return positive_part(norm(z) - s_star) + norm(norm(v_tau) * z - s_star * v_tau);
}

StressSplit total_stress_tau(const SymTensor2& D, double tau, const RheologyParams& params) {
  StressSplit out;
  out.Z = plastic_stress_reg(D, tau, params.reg_n);
  out.V = viscous_stress_activated(D, params.nu_star, params.delta_star, params.q_exponent);
  out.S = out.Z + out.V;
  return out;
}

StressSplit total_stress(const SymTensor2& D, double p_f, double p_s, const RheologyParams& params) {
  return total_stress_tau(D, yield_stress(p_s, p_f, params.q_star), params);
}

}  // namespace granflow
