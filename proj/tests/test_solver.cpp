#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "granflow/config.hpp"
#include "granflow/operators.hpp"
#include "granflow/solver.hpp"

using namespace granflow;
using std::numbers::pi;
using nlohmann::json;

namespace {

SimConfig base_config(int n = 16) {
  SimConfig cfg;
  cfg.grid = Grid(n, n, 1.0, 1.0);
  cfg.rheology.nu_star = 1.0;
  cfg.rheology.delta_star = 0.0;
  cfg.rheology.q_star = 0.0;
  cfg.rheology.q_exponent = 2.0;
  cfg.rheology.reg_n = 100;
  cfg.slip.s_star = 0.0;
  cfg.slip.beta_star = 0.0;
  cfg.slip.gamma_star = 1.0;
  cfg.time.dt = 1e-2;
  cfg.time.t_end = 1e-2;
  return cfg;
}

VectorField smooth_solenoidal(const Grid& g, double a = 1.0) {
  VectorField v = VectorField::from_streamfunction(g, [=](double x, double y) {
    return a * std::sin(pi * x) * std::sin(pi * y) * (1.0 + 0.5 * x);
  });
  v.zero_boundary_normal();
  return v;
}

double max_diff(const VectorField& a, const VectorField& b) {
  VectorField d = a;
  d -= b;
  return d.linf_norm();
}

double max_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) m = std::max(m, std::abs(a.values()[k] - b.values()[k]));
  return m;
}

ScalarField minus_mean(ScalarField s) {
  const double m = s.mean();
  for (double& x : s.values()) x -= m;
  return s;
}

}  // namespace

// ---- projection ------------------------------------------------------------

TEST_CASE("leray projection annihilates a discrete gradient") {
  const Grid g(24, 24, 1.0, 1.0);
  const ScalarField phi =
      minus_mean(ScalarField::sample(g, [](double x, double y) { return std::cos(pi * x) * std::cos(2 * pi * y) + x * y; }));
  VectorField w = gradient(phi);
  w.zero_boundary_normal();
  const LerayResult r = leray_project(w, 1e-10);
  CHECK(r.v.linf_norm() <= 1e-8);
  CHECK(divergence(r.v).linf_norm() <= 1e-10);
  CHECK(r.v.boundary_normal_is_zero());
}

TEST_CASE("leray projection keeps a discretely solenoidal field") {
  const Grid g(24, 20, 1.0, 0.8);
  const VectorField v = VectorField::from_streamfunction(g, [](double x, double y) {
    return std::sin(pi * x) * std::sin(pi * y / 0.8) * std::exp(x);
  });
  VectorField vz = v;
  vz.zero_boundary_normal();
  const LerayResult r = leray_project(vz, 1e-10);
  CHECK(max_diff(r.v, vz) <= 1e-10 * (1.0 + vz.linf_norm()));
}

TEST_CASE("leray projection is idempotent and removes divergence") {
  const Grid g(20, 20, 1.0, 1.0);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  VectorField w(g);
  for (double& x : w.u_values()) x = nd(rng);
  for (double& x : w.v_values()) x = nd(rng);
  w.zero_boundary_normal();
  const double tol = 1e-10;
  const LerayResult once = leray_project(w, tol);
  const LerayResult twice = leray_project(once.v, tol);
  CHECK(divergence(once.v).linf_norm() <= tol);
  CHECK(once.v.boundary_normal_is_zero());
  CHECK(max_diff(once.v, twice.v) <= 2 * tol);
  // orthogonality of the removed part
  VectorField removed = w;
  removed -= once.v;
  CHECK(std::abs(removed.dot(once.v)) <= 1e-9 * w.l2_norm() * w.l2_norm());
}

// ---- momentum --------------------------------------------------------------

TEST_CASE("momentum step keeps the rest state with zero forcing") {
  SimConfig cfg = base_config();
  cfg.rheology.q_star = 1.0;
  cfg.lithostatic.value = 1.0;
  const SimState s0 = initial_state(cfg, VectorField(cfg.grid), ScalarField(cfg.grid));
  const SimState s1 = momentum_step(s0, cfg);
  CHECK(s1.v.linf_norm() == 0.0);
  CHECK(s1.p.linf_norm() == 0.0);
  CHECK(s1.t == doctest::Approx(cfg.time.dt));
}

TEST_CASE("momentum step output is discretely divergence-free") {
  SimConfig cfg = base_config(20);
  cfg.rheology.delta_star = 0.1;
  cfg.rheology.q_star = 0.5;
  cfg.lithostatic.value = 1.0;
  cfg.body_force.kind = BodyForceSpec::Kind::vortex;
  cfg.body_force.amplitude = 2.0;
  Stepper stepper(cfg);
  const SimState s0 = initial_state(cfg, smooth_solenoidal(cfg.grid), ScalarField(cfg.grid));
  StepInfo info;
  const SimState s1 = stepper.momentum(s0, &info);
  CHECK(info.div_linf <= cfg.time.poisson_tol);
  CHECK(divergence(s1.v).linf_norm() <= cfg.time.poisson_tol);
  CHECK(s1.v.boundary_normal_is_zero());
  CHECK(info.picard_residual <= cfg.time.picard_tol);
  CHECK(info.picard_iterations >= 1);
  CHECK(s1.v.all_finite());
}

TEST_CASE("Newtonian step without forcing dissipates kinetic energy") {
  SimConfig cfg = base_config(20);
  const SimState s0 = initial_state(cfg, smooth_solenoidal(cfg.grid), ScalarField(cfg.grid));
  const SimState s1 = momentum_step(s0, cfg);
  CHECK(s1.v.l2_norm() < s0.v.l2_norm());
}

TEST_CASE("one Picard iteration is not enough for a nonlinear step") {
  SimConfig cfg = base_config();
  cfg.rheology.q_star = 1.0;
  cfg.rheology.delta_star = 0.2;
  cfg.time.picard_max = 1;
  const SimState s0 = initial_state(cfg, smooth_solenoidal(cfg.grid), ScalarField(cfg.grid));
  CHECK_THROWS_AS(momentum_step(s0, cfg), PicardNoConvergence);
  try {
    momentum_step(s0, cfg);
  } catch (const PicardNoConvergence& e) {
    CHECK(e.iterations() == 1);
    CHECK(e.residual() > cfg.time.picard_tol);
  }
}

// ---- pore pressure ---------------------------------------------------------

TEST_CASE("pore pressure: constant stays constant under a solenoidal velocity") {
  SimConfig cfg = base_config(20);
  SimState s;
  s.v = smooth_solenoidal(cfg.grid, 3.0);
  s.p = ScalarField(cfg.grid);
  s.p_f = ScalarField(cfg.grid, 2.5);
  for (AdvectionScheme scheme : {AdvectionScheme::upwind, AdvectionScheme::central}) {
    cfg.physics.advection = scheme;
    SimState cur = s;
    for (int k = 0; k < 5; ++k) cur = pore_pressure_step(cur, cfg);
    for (double x : cur.p_f.values()) CHECK(std::abs(x - 2.5) <= 1e-10);
    CHECK(cur.t == doctest::Approx(5 * cfg.time.dt));
  }
}

TEST_CASE("pore pressure relaxes to the steady Neumann problem with gradient forcing") {
  // Steady state: K lap p = K rho_f div b with b = A grad(cos cos), so p -> rho_f A cos cos + const.
  auto error_at = [](int n) {
    SimConfig cfg = base_config(n);
    cfg.physics.permeability = 0.7;
    cfg.physics.rho_f = 1.3;
    cfg.body_force.kind = BodyForceSpec::Kind::gradient;
    cfg.body_force.amplitude = 0.8;
    cfg.time.dt = 1e4;
    cfg.time.poisson_tol = 1e-13;
    SimState s;
    s.v = VectorField(cfg.grid);
    s.p = ScalarField(cfg.grid);
    s.p_f = ScalarField(cfg.grid, 0.0);
    for (int k = 0; k < 4; ++k) s = pore_pressure_step(s, cfg);

    VectorField b = body_force_field(cfg, s.t);
    b.zero_boundary_normal();
    const ScalarField lap = laplacian_neumann(s.p_f);
    const ScalarField div_b = divergence(b);
    double residual = 0.0;
    for (std::size_t k = 0; k < lap.values().size(); ++k)
      residual = std::max(residual, std::abs(cfg.physics.permeability *
                                             (lap.values()[k] - cfg.physics.rho_f * div_b.values()[k])));
    CHECK(residual <= 1e-7);

    const ScalarField exact = minus_mean(ScalarField::sample(cfg.grid, [&](double x, double y) {
      return cfg.physics.rho_f * cfg.body_force.amplitude * std::cos(pi * x) * std::cos(pi * y);
    }));
    return max_diff(minus_mean(s.p_f), exact);
  };
  const double e16 = error_at(16), e32 = error_at(32);
  CHECK(e16 < 1e-2);
  CHECK(std::log2(e16 / e32) >= 1.8);
}

TEST_CASE("pore pressure: cosine mode decays at the discrete eigenvalue rate") {
  SimConfig cfg = base_config(32);
  cfg.physics.permeability = 0.5;
  cfg.time.dt = 1e-3;
  SimState s;
  s.v = VectorField(cfg.grid);
  s.p = ScalarField(cfg.grid);
  s.p_f = ScalarField::sample(cfg.grid, [](double x, double) { return std::cos(pi * x); });
  const double h = cfg.grid.hx();
  const double lambda_h = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2.0), 2);
  const double factor = 1.0 / (1.0 + cfg.time.dt * cfg.physics.permeability * lambda_h);
  const double n0 = s.p_f.l2_norm();
  for (int k = 1; k <= 20; ++k) {
    s = pore_pressure_step(s, cfg);
    CHECK(s.p_f.l2_norm() == doctest::Approx(n0 * std::pow(factor, k)).epsilon(1e-8));
  }
}

// ---- fluid velocity --------------------------------------------------------

TEST_CASE("fluid velocity equals the solid velocity when porosity vanishes") {
  SimConfig cfg = base_config(12);
  cfg.porosity.phi0 = 0.0;
  SimState s;
  s.v = smooth_solenoidal(cfg.grid);
  s.p = ScalarField(cfg.grid, 1.0);
  s.p_f = ScalarField::sample(cfg.grid, [](double x, double y) { return x * x + std::sin(y); });
  CHECK(max_diff(fluid_velocity(s, cfg), s.v) == 0.0);
}

TEST_CASE("fluid velocity is Darcy flux for constant porosity at rest") {
  SimConfig cfg = base_config(12);
  cfg.porosity.phi0 = 0.3;
  cfg.physics.alpha_drag = 2.0;
  SimState s;
  s.v = VectorField(cfg.grid);
  s.p = ScalarField(cfg.grid);
  s.p_f = ScalarField::sample(cfg.grid, [](double x, double y) { return std::cos(pi * x) + x * y; });
  const VectorField vf = fluid_velocity(s, cfg);
  const Grid& g = cfg.grid;
  const double c = 0.3 / 2.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      CHECK(vf.u(i, j) == doctest::Approx(-c * (s.p_f(i, j) - s.p_f(i - 1, j)) / g.hx()).epsilon(1e-12));
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      CHECK(vf.v(i, j) == doctest::Approx(-c * (s.p_f(i, j) - s.p_f(i, j - 1)) / g.hy()).epsilon(1e-12));
  CHECK(vf.boundary_normal_is_zero());
}

TEST_CASE("hydrostatic pore pressure gives no relative flow") {
  SimConfig cfg = base_config(12);
  cfg.physics.rho_f = 2.0;
  cfg.body_force.kind = BodyForceSpec::Kind::constant;
  cfg.body_force.bx = 0.0;
  cfg.body_force.by = -1.5;
  SimState s;
  s.v = smooth_solenoidal(cfg.grid);
  s.p = ScalarField(cfg.grid);
  s.p_f = ScalarField::sample(cfg.grid, [](double, double y) { return 2.0 * -1.5 * y + 4.0; });
  CHECK(max_diff(fluid_velocity(s, cfg), s.v) <= 1e-12);
}

// ---- simulate --------------------------------------------------------------

TEST_CASE("simulate takes one step when t_end equals dt") {
  SimConfig cfg = base_config();
  int calls = 0;
  std::int64_t last_step = 0;
  const SimState s = simulate(cfg, {[&](const SimState&, const SimState&, const StepInfo& info) {
                                ++calls;
                                last_step = info.step;
                              }});
  CHECK(calls == 1);
  CHECK(last_step == 1);
  CHECK(s.t == doctest::Approx(cfg.time.dt));
}

TEST_CASE("simulate from rest with zero forcing stays at rest") {
  SimConfig cfg = base_config();
  cfg.rheology.q_star = 1.0;
  cfg.rheology.delta_star = 0.3;
  cfg.time.t_end = 0.1;
  double max_speed = 0.0;
  const SimState s = simulate(cfg, {[&](const SimState&, const SimState& next, const StepInfo&) {
                                max_speed = std::max(max_speed, next.v.linf_norm());
                              }});
  CHECK(max_speed == 0.0);
  CHECK(s.v.linf_norm() == 0.0);
}

TEST_CASE("simulate wraps step failures with the step index") {
  SimConfig cfg = base_config();
  cfg.rheology.q_star = 1.0;
  cfg.rheology.delta_star = 0.2;
  cfg.time.picard_max = 1;
  cfg.time.t_end = 0.05;
  cfg.initial_velocity.kind = InitialVelocitySpec::Kind::vortex;
  cfg.initial_velocity.amplitude = 1.0;
  try {
    simulate(cfg);
    FAIL("expected SimulationError");
  } catch (const SimulationError& e) {
    CHECK(e.step() == 1);
  }
}

TEST_CASE("simulate flags steps above the CFL limit") {
  SimConfig cfg = base_config(16);
  cfg.time.dt = 0.5;
  cfg.time.t_end = 0.5;
  cfg.initial_velocity.kind = InitialVelocitySpec::Kind::vortex;
  cfg.initial_velocity.amplitude = 5.0;
  bool warned = false;
  simulate(cfg, {[&](const SimState&, const SimState&, const StepInfo& info) {
             warned = warned || (info.cfl_warning && info.cfl > 1.0);
           }});
  CHECK(warned);
}

TEST_CASE("simulate is deterministic") {
  SimConfig cfg = base_config();
  cfg.rheology.q_star = 0.5;
  cfg.rheology.delta_star = 0.1;
  cfg.lithostatic.value = 1.0;
  cfg.body_force.kind = BodyForceSpec::Kind::vortex;
  cfg.body_force.amplitude = 3.0;
  cfg.time.t_end = 0.05;
  const SimState a = simulate(cfg), b = simulate(cfg);
  CHECK(a.v.u_values() == b.v.u_values());
  CHECK(a.v.v_values() == b.v.v_values());
  CHECK(a.p_f.values() == b.p_f.values());
}

// ---- config ----------------------------------------------------------------

TEST_CASE("config: empty document takes the defaults") {
  const SimConfig cfg = config_from_json(json::object());
  const SimConfig def;
  CHECK(config_hash(cfg) == config_hash(def));
  CHECK(cfg.time.anderson_depth == 5);
}

TEST_CASE("config: explicit document round-trips") {
  SimConfig cfg = base_config(24);
  cfg.name = "roundtrip";
  cfg.rheology.reg_n = 77;
  cfg.time.anderson_depth = 2;
  cfg.initial_pore_pressure.kind = InitialPorePressureSpec::Kind::patch;
  cfg.initial_pore_pressure.inside = 2.0;
  cfg.initial_pore_pressure.x1 = 0.5;
  cfg.initial_pore_pressure.y1 = 1.0;
  const json doc = config_to_json(cfg);
  const SimConfig back = config_from_json(doc);
  CHECK(config_to_json(back) == doc);
  CHECK(config_hash(back) == config_hash(cfg));
  CHECK(back.time.anderson_depth == 2);
  CHECK(back.rheology.reg_n == 77);
}

TEST_CASE("config: hash ignores key order and changes with values") {
  const json a = json::parse(R"({"grid": {"nx": 8, "ny": 8}, "time": {"dt": 0.01, "t_end": 0.1}})");
  const json b = json::parse(R"({"time": {"t_end": 0.1, "dt": 0.01}, "grid": {"ny": 8, "nx": 8}})");
  const json c = json::parse(R"({"time": {"t_end": 0.1, "dt": 0.02}, "grid": {"ny": 8, "nx": 8}})");
  CHECK(config_hash(config_from_json(a)) == config_hash(config_from_json(b)));
  CHECK(config_hash(config_from_json(a)) != config_hash(config_from_json(c)));
  CHECK(config_hash(config_from_json(a)).size() == 64);
}

TEST_CASE("config: strict parsing") {
  auto kind_of = [](const json& doc) {
    try {
      config_from_json(doc);
    } catch (const ConfigError& e) {
      return static_cast<int>(e.kind());
    }
    return -1;
  };
  const int parse = static_cast<int>(ConfigError::Kind::parse);
  const int validate = static_cast<int>(ConfigError::Kind::validate);
  CHECK(kind_of(json::parse(R"({"grid": {"nx": 8, "nz": 8}})")) == parse);
  CHECK(kind_of(json::parse(R"({"gird": {}})")) == parse);
  CHECK(kind_of(json::parse(R"({"grid": {"nx": "eight"}})")) == parse);
  CHECK(kind_of(json::parse(R"({"grid": {"nx": 8.5}})")) == parse);
  CHECK(kind_of(json::parse(R"({"forcing": {"body_force": {"kind": "swirl"}}})")) == parse);
  CHECK(kind_of(json::parse(R"([1, 2])")) == parse);
  CHECK(kind_of(json::parse(R"({"time": {"dt": 0}})")) == validate);
  CHECK(kind_of(json::parse(R"({"time": {"dt": 0.1, "t_end": 0.05}})")) == validate);
  CHECK(kind_of(json::parse(R"({"time": {"anderson_depth": -1}})")) == validate);
  CHECK(kind_of(json::parse(R"({"grid": {"nx": 2}})")) == validate);
  CHECK(kind_of(json::parse(R"({"rheology": {"q_exponent": 0.5}})")) == validate);
  CHECK(kind_of(json::parse(R"({"rheology": {"reg_n": 0}})")) == validate);
  CHECK(kind_of(json::parse(R"({"physics": {"permeability": -1}})")) == validate);
  CHECK(kind_of(json::parse(
            R"({"grid": {"lx": 2.0}, "forcing": {"body_force": {"kind": "mms_newtonian"}}})")) == validate);
}

TEST_CASE("config: load_config reports missing files and bad JSON as parse errors") {
  try {
    load_config("/nonexistent/granflow.json");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigError::Kind::parse);
    CHECK(std::string(e.what()).find("/nonexistent/granflow.json") != std::string::npos);
  }
  const std::string path = "test_solver_bad.json";
  std::ofstream(path) << "{ \"grid\": ";
  CHECK_THROWS_AS(load_config(path), ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("config: step count rounds t_end to a multiple of dt") {
  SimConfig cfg;
  cfg.time.dt = 0.1;
  cfg.time.t_end = 0.3;
  CHECK(cfg.step_count() == 3);
  cfg.time.t_end = 0.1;
  CHECK(cfg.step_count() == 1);
}
