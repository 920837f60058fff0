#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "granflow/rheology.hpp"

using namespace granflow;

namespace {

SymTensor2 unit_tensor(double xx, double yy, double xy) {
  SymTensor2 d{xx, yy, xy};
  return (1.0 / norm(d)) * d;
}

bool close(const SymTensor2& a, const SymTensor2& b, double tol) { return norm(a - b) <= tol; }

SymTensor2 rotate(const SymTensor2& a, double th) {
  const double c = std::cos(th), s = std::sin(th);
  return {c * c * a.xx - 2.0 * c * s * a.xy + s * s * a.yy, s * s * a.xx + 2.0 * c * s * a.xy + c * c * a.yy,
          c * s * (a.xx - a.yy) + (c * c - s * s) * a.xy};
}

}  // namespace

TEST_CASE("frobenius norm counts the off-diagonal entry twice") {
  const SymTensor2 d{1.0, 2.0, 3.0};
  CHECK(norm(d) == doctest::Approx(std::sqrt(1.0 + 4.0 + 18.0)));
  CHECK(contract(d, SymTensor2{0.0, 0.0, 1.0}) == doctest::Approx(6.0));
}

TEST_CASE("yield_stress") {
  CHECK(yield_stress(2.0, 1.0, 1.0) == 1.0);
  CHECK(yield_stress(1.0, 3.0, 1.0) == 0.0);
  CHECK(yield_stress(1.5, 0.5, 2.0) == doctest::Approx(2.0));

  SUBCASE("Lipschitz in p_f with constant q_star") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
      const double ps = u(rng), pf = u(rng), q = std::abs(u(rng)), h = 1e-6;
      const double slope = std::abs(yield_stress(ps, pf + h, q) - yield_stress(ps, pf, q)) / h;
      CHECK(slope <= q * (1.0 + 1e-6) + 1e-9);
    }
  }
}

TEST_CASE("plastic_stress_reg") {
  CHECK(norm(plastic_stress_reg(SymTensor2{}, 5.0, 10)) == 0.0);
  const SymTensor2 d = unit_tensor(1.0, -1.0, 0.5);
  CHECK(close(plastic_stress_reg(d, 1.0, 1), 0.5 * d, 1e-15));
  CHECK(norm(plastic_stress_reg(SymTensor2{3.0, 1.0, 2.0}, 0.0, 7)) == 0.0);

  SUBCASE("bounded strictly below tau") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int k = 0; k < 10000; ++k) {
      const SymTensor2 dd{u(rng), u(rng), u(rng)};
      const double tau = std::abs(u(rng));
      const std::int64_t n = 1 + k % 300;
      const double z = norm(plastic_stress_reg(dd, tau, n));
      const double m = norm(dd);
      CHECK(z <= tau * m / (m + 1.0 / n) * (1.0 + 1e-14));
      if (tau > 0.0) CHECK(z < tau);
    }
  }
}

TEST_CASE("viscous_stress_activated") {
  const SymTensor2 d = 0.3 * unit_tensor(1.0, 0.0, 1.0);
  CHECK(norm(viscous_stress_activated(d, 0.7, 0.5, 2.5)) == 0.0);
  CHECK(close(viscous_stress_activated(d, 0.5, 0.0, 2.0), d, 1e-15));
  const SymTensor2 d2 = 2.0 * unit_tensor(0.3, -0.2, 0.9);
  CHECK(close(viscous_stress_activated(d2, 0.5, 1.0, 2.0), 0.5 * d2, 1e-14));

  SUBCASE("zero at D = 0 for every q, finite near 0 for q < 2") {
    for (double q : {1.2, 1.5, 2.0, 3.0}) CHECK(norm(viscous_stress_activated(SymTensor2{}, 0.5, 0.0, q)) == 0.0);
    const SymTensor2 tiny{1e-300, 0.0, 0.0};
    CHECK(std::isfinite(norm(viscous_stress_activated(tiny, 0.5, 0.0, 1.5))));
  }
  SUBCASE("power law magnitude") {
    const SymTensor2 e = 3.0 * unit_tensor(1.0, 2.0, 0.0);
    // 2 nu |D|^{q-2} (|D| - delta) with nu = 1, q = 3, delta = 1 -> 2 * 3 * 2 = 12
    CHECK(norm(viscous_stress_activated(e, 1.0, 1.0, 3.0)) == doctest::Approx(12.0));
  }
  SUBCASE("secant coefficient reproduces the stress") {
    const SymTensor2 e{0.4, -0.1, 0.7};
    for (double q : {1.5, 2.0, 3.0}) {
      const double mu = viscous_secant(norm(e), 0.6, 0.2, q);
      CHECK(close(viscous_stress_activated(e, 0.6, 0.2, q), 2.0 * mu * e, 1e-14));
    }
  }
}

TEST_CASE("bulk_implicit_residual") {
  const SymTensor2 d = 1.7 * unit_tensor(0.2, 0.5, -0.4);
  const double tau = 2.5;
  CHECK(bulk_implicit_residual((tau / norm(d)) * d, d, tau) <= 1e-14);
  CHECK(bulk_implicit_residual(SymTensor2{0.5, 0.5, 0.0}, SymTensor2{}, 1.0) == 0.0);
  CHECK(bulk_implicit_residual(SymTensor2{2.0, 0.0, 0.0}, SymTensor2{}, 1.0) == doctest::Approx(1.0));

  SUBCASE("regularized stress misses the graph by tau |D| / (n |D| + 1) <= tau / n") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 2000; ++k) {
      const SymTensor2 dd{u(rng), u(rng), u(rng)};
      const double t = std::abs(u(rng));
      const std::int64_t n = 1 + k % 256;
      const double r = bulk_implicit_residual(plastic_stress_reg(dd, t, n), dd, t);
      const double m = norm(dd);
      CHECK(r == doctest::Approx(t * m / (n * m + 1.0)).epsilon(1e-10).scale(1e-14));
      CHECK(r <= t / static_cast<double>(n));
    }
  }
  SUBCASE("residual halves as n doubles on fixed inputs") {
    const SymTensor2 big = 50.0 * unit_tensor(1.0, -1.0, 0.3);
    double prev = bulk_implicit_residual(plastic_stress_reg(big, 1.0, 1), big, 1.0);
    for (std::int64_t n = 2; n <= 256; n *= 2) {
      const double r = bulk_implicit_residual(plastic_stress_reg(big, 1.0, n), big, 1.0);
      CHECK(r / prev <= 0.51);
      CHECK(r / prev >= 0.5);
      prev = r;
    }
  }
}

TEST_CASE("slip_traction_reg") {
  SlipParams navier;
  CHECK(norm(slip_traction_reg(Vec2{}, navier, 10)) == 0.0);
  const Vec2 v{0.3, -0.4};
  const Vec2 s = slip_traction_reg(v, navier, 10);
  CHECK(s.x == doctest::Approx(v.x));
  CHECK(s.y == doctest::Approx(v.y));

  SlipParams shifted{1.0, 1.0, 1.0};
  const Vec2 unit{0.6, 0.8};
  const Vec2 half = slip_traction_reg(unit, shifted, 1);
  CHECK(half.x == doctest::Approx(0.3));
  CHECK(half.y == doctest::Approx(0.4));

  SUBCASE("collinear and magnitude consistent") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 1000; ++k) {
      const SlipParams p{std::abs(u(rng)), std::abs(u(rng)), std::abs(u(rng))};
      const Vec2 w{u(rng), u(rng)};
      const Vec2 t = slip_traction_reg(w, p, 1 + k % 50);
      CHECK(std::abs(w.x * t.y - w.y * t.x) <= 1e-12 * (1.0 + norm(w) * norm(t)));
      CHECK(dot(w, t) >= 0.0);
      CHECK(norm(t) == doctest::Approx(slip_traction_magnitude(norm(w), p, 1 + k % 50)));
    }
  }
}

TEST_CASE("slip_implicit_residual") {
  const Vec2 v{1.0, 2.0};
  const double s = 0.7;
  const Vec2 z{s * v.x / norm(v), s * v.y / norm(v)};
  CHECK(slip_implicit_residual(z, v, s) <= 1e-14);
  CHECK(slip_implicit_residual(Vec2{0.1, 0.2}, Vec2{}, 1.0) == 0.0);
  CHECK(slip_implicit_residual(Vec2{}, Vec2{2.0, 0.0}, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("total_stress") {
  RheologyParams p;
  StressSplit zero = total_stress(SymTensor2{}, 0.0, 1.0, p);
  CHECK(norm(zero.S) == 0.0);
  CHECK(norm(zero.Z) == 0.0);
  CHECK(norm(zero.V) == 0.0);

  const SymTensor2 d{0.3, -0.3, 0.8};
  const StressSplit fluid = total_stress(d, 2.0, 1.0, p);
  CHECK(norm(fluid.Z) == 0.0);
  CHECK(close(fluid.V, d, 1e-15));
  CHECK(close(fluid.S, d, 1e-15));

  SUBCASE("random splits") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 5000; ++k) {
      RheologyParams r;
      r.nu_star = 0.1 + std::abs(u(rng));
      r.delta_star = std::abs(u(rng)) / 3.0;
      r.q_star = std::abs(u(rng));
      r.q_exponent = 1.2 + std::abs(u(rng));
      r.reg_n = 1 + k % 100;
      const SymTensor2 dd{u(rng), u(rng), u(rng)};
      const double pf = u(rng), ps = u(rng);
      const StressSplit sp = total_stress(dd, pf, ps, r);
      const SymTensor2 sum = sp.Z + sp.V;
      CHECK(sp.S.xx == sum.xx);
      CHECK(sp.S.yy == sum.yy);
      CHECK(sp.S.xy == sum.xy);
      const double tau = yield_stress(ps, pf, r.q_star);
      CHECK(norm(sp.Z) <= tau + 1e-12);
      if (tau > 0.0) CHECK(norm(sp.Z) < tau);
    }
  }
}

TEST_CASE("monotonicity of the regularized plastic map and of the activated viscous map") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0), e(-2.0, 2.0);
  auto sample = [&] {
    const double s = std::pow(10.0, e(rng));
    return SymTensor2{s * u(rng), s * u(rng), s * u(rng)};
  };
  double worst_z = 0.0, worst_v = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const SymTensor2 a = sample(), b = sample();
    const double scale = (1.0 + norm(a) + norm(b)) * (1.0 + norm(a) + norm(b));
    const double tau = 3.0 * std::abs(u(rng));
    const std::int64_t n = 1 + k % 1000;
    worst_z = std::min(worst_z, contract(plastic_stress_reg(a, tau, n) - plastic_stress_reg(b, tau, n), a - b) / scale);
  }
  for (double q : {1.5, 2.0, 3.0}) {
    for (int k = 0; k < 100000; ++k) {
      const SymTensor2 a = sample(), b = sample();
      const double scale = (1.0 + norm(a) + norm(b)) * (1.0 + norm(a) + norm(b));
      const double nu = 0.1 + std::abs(u(rng)), delta = std::abs(u(rng));
      worst_v = std::min(worst_v, contract(viscous_stress_activated(a, nu, delta, q) -
                                               viscous_stress_activated(b, nu, delta, q),
                                           a - b) /
                                      scale);
    }
  }
  CHECK(worst_z >= -1e-12);
  CHECK(worst_v >= -1e-12);
}

TEST_CASE("frame indifference") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RheologyParams p;
  p.delta_star = 0.3;
  p.q_exponent = 2.5;
  p.reg_n = 20;
  for (int k = 0; k < 2000; ++k) {
    const SymTensor2 d{3.0 * u(rng) - 1.5, 3.0 * u(rng) - 1.5, 3.0 * u(rng) - 1.5};
    const double th = 2.0 * std::numbers::pi * u(rng);
    const StressSplit a = total_stress(rotate(d, th), 0.2, 1.0, p);
    const StressSplit b = total_stress(d, 0.2, 1.0, p);
    CHECK(norm(a.S - rotate(b.S, th)) <= 1e-12 * (1.0 + norm(b.S)));
  }
}

TEST_CASE("parameter validation") {
  RheologyParams p;
  CHECK_NOTHROW(p.validate());
  p.nu_star = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = RheologyParams{};
  p.q_exponent = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = RheologyParams{};
  p.reg_n = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = RheologyParams{};
  p.delta_star = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  SlipParams s;
  s.s_star = -0.1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
