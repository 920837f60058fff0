#pragma once

// Simulation configuration and the analytic data specifications (body force,
// lithostatic pressure, porosity closure, initial data).

#include <cstdint>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "granflow/fields.hpp"
#include "granflow/operators.hpp"
#include "granflow/rheology.hpp"

namespace granflow {

class ConfigError : public std::runtime_error {
 public:
  enum class Kind { parse, validate };
  ConfigError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct TimeParams {
  double dt = 1e-3;
  double t_end = 1e-2;
  double picard_tol = 1e-8;
  int picard_max = 200;
  /// Anderson mixing depth for the Picard iterates (0: plain Picard).
  int anderson_depth = 5;
  double poisson_tol = 1e-10;
};

struct PhysicsParams {
  double alpha_drag = 1.0;
  double rho_s = 1.0;
  double rho_f = 1.0;
  double permeability = 1.0;  // K
  /// Adds d(p_s)/dt to the pore-pressure source; dropped by default.
  bool include_dt_ps = false;
  AdvectionScheme advection = AdvectionScheme::upwind;
};

/// phi_hat(pi) with pi = p - p_f.
struct PorositySpec {
  enum class Kind { constant, exponential };
  Kind kind = Kind::constant;
  double phi0 = 0.3;
  double phi_min = 0.1;
  double phi_max = 0.5;
  double pi_ref = 1.0;

  double operator()(double effective_pressure) const;
};

struct BodyForceSpec {
  /// zero; constant (bx, by); vortex = A curl(sin sin); gradient = A grad(cos cos);
  /// mms_newtonian = forcing of the manufactured Navier-slip vortex (unit square only).
  enum class Kind { zero, constant, vortex, gradient, mms_newtonian };
  Kind kind = Kind::zero;
  double amplitude = 0.0;
  double bx = 0.0;
  double by = 0.0;
};

/// p_s(t, x, y) = value + gradient (ly - y) + rate t.
struct LithostaticSpec {
  double value = 0.0;
  double gradient = 0.0;
  double rate = 0.0;
};

struct InitialVelocitySpec {
  enum class Kind { zero, vortex, mms_newtonian };
  Kind kind = Kind::zero;
  double amplitude = 0.0;
};

struct InitialPorePressureSpec {
  /// constant; cosine = value + amplitude cos(pi x / lx); patch = value, with
  /// `inside` in the rectangle [x0, x1] x [y0, y1].
  enum class Kind { constant, cosine, patch };
  Kind kind = Kind::constant;
  double value = 0.0;
  double amplitude = 0.0;
  double inside = 0.0;
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;
};

struct OutputSpec {
  int snapshot_every = 0;  // 0: final snapshot only
  bool write_vtk = true;
};

struct SimConfig {
  std::string name = "run";
  Grid grid;
  RheologyParams rheology;
  SlipParams slip;
  TimeParams time;
  PhysicsParams physics;
  PorositySpec porosity;
  BodyForceSpec body_force;
  LithostaticSpec lithostatic;
  InitialVelocitySpec initial_velocity;
  InitialPorePressureSpec initial_pore_pressure;
  OutputSpec output;

  /// Throws ConfigError(validate) on the first violated invariant.
  void validate() const;

  /// Number of steps to reach t_end (t_end rounded to the nearest multiple of dt).
  std::int64_t step_count() const;
};

/// Strict parse: unknown keys and wrong types are rejected, missing keys take defaults.
SimConfig config_from_json(const nlohmann::json& doc);
SimConfig load_config(const std::string& path);

/// Fully explicit document (every default injected); keys sorted.
nlohmann::json config_to_json(const SimConfig& cfg);

/// SHA-256 hex digest of the canonical JSON dump.
std::string config_hash(const SimConfig& cfg);

// ---- analytic data -------------------------------------------------------

Vec2 body_force(const SimConfig& cfg, double t, double x, double y);
double lithostatic_pressure(const SimConfig& cfg, double t, double x, double y);

VectorField body_force_field(const SimConfig& cfg, double t);
ScalarField lithostatic_field(const SimConfig& cfg, double t);

/// Manufactured steady vortex satisfying v.n = 0 and Navier slip with the
/// configured nu_star, gamma_star on the unit square.
Vec2 mms_velocity(const SimConfig& cfg, double amplitude, double x, double y);

VectorField initial_velocity(const SimConfig& cfg);
ScalarField initial_pore_pressure(const SimConfig& cfg);

}  // namespace granflow
