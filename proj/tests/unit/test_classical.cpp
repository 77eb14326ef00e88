#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/classical.hpp"
#include "core/error.hpp"
#include "core/quadrature.hpp"

using namespace frictionlab;
using namespace frictionlab::classical;

namespace {

model::ModelConfig strong(double gamma) {
  model::ModelConfig cfg;
  cfg.rho2 = cfg.rho2.scaled(std::sqrt(gamma / quad::friction_coefficient(cfg).gamma));
  return cfg;
}

RunParams params(double duration, double dt, std::size_t stride, double q0) {
  RunParams rp;
  rp.duration = duration;
  rp.dt = dt;
  rp.stride = stride;
  rp.q0[0] = q0;
  rp.grid.x_lo = -3.0;
  rp.grid.x_hi = 3.0;
  return rp;
}

}  // namespace

TEST_CASE("free fall without coupling") {
  model::ModelConfig cfg;
  cfg.rho1 = cfg.rho1.scaled(0.0);
  cfg.potential = model::Potential::linear({0.3, 0.0, 0.0});
  auto rp = params(2.0, 1e-3, 100, 0.0);
  rp.grid.r_max = 2.0;
  rp.grid.absorbing = true;
  const auto s = run(cfg, rp);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.q[i][0] == doctest::Approx(0.15 * s.t[i] * s.t[i]).epsilon(1e-10).scale(1e-12));
    CHECK(s.p[i][0] == doctest::Approx(0.3 * s.t[i]).epsilon(1e-10).scale(1e-12));
    CHECK(s.e_field[i] == 0.0);
  }
}

TEST_CASE("decoupled oscillator keeps its energy") {
  model::ModelConfig cfg;
  cfg.rho1 = cfg.rho1.scaled(0.0);
  auto rp = params(1.0, 1e-4, 100, 1.0);
  rp.grid.r_max = 4.0;
  rp.grid.absorbing = true;
  const auto s = run(cfg, rp);
  CHECK(s.e_total.front() == doctest::Approx(0.5));
  for (double e : s.e_total) CHECK(std::abs(e - 0.5) / 0.5 < 1e-8);
  CHECK(s.q.back()[0] == doctest::Approx(std::cos(1.0)).epsilon(1e-7));
}

TEST_CASE("coupled run: bounded energy error of order dt^2") {
  const auto cfg = strong(0.5);
  auto drift = [&](double dt) {
    const auto s = run(cfg, params(2.0, dt, static_cast<std::size_t>(std::lround(0.02 / dt)), 1.0));
    double d = 0.0;
    for (double e : s.e_total) d = std::max(d, std::abs(e - s.e_total.front()));
    CHECK(s.e_particle.back() < s.e_particle.front());
    return d / std::abs(s.e_total.front());
  };
  const double a = drift(2e-3), b = drift(1e-3);
  CHECK(a < 1e-3);
  CHECK(a / b == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("second-order convergence under dt halving") {
  const auto cfg = strong(0.5);
  const auto a = run(cfg, params(2.0, 4e-3, 8, 1.0));
  const auto b = run(cfg, params(2.0, 2e-3, 16, 1.0));
  const auto c = run(cfg, params(2.0, 1e-3, 32, 1.0));
  REQUIRE(a.size() == b.size());
  REQUIRE(b.size() == c.size());
  double e1 = 0, e2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.t[i] == doctest::Approx(c.t[i]));
    e1 = std::max(e1, std::abs(a.q[i][0] - b.q[i][0]));
    e2 = std::max(e2, std::abs(b.q[i][0] - c.q[i][0]));
  }
  CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("outer radius beyond c T does not change the trajectory") {
  const auto cfg = strong(0.5);
  auto rp = params(1.5, 4e-3, 10, 1.0);
  const auto a = run(cfg, rp);
  rp.grid.r_max = 40.0;
  const auto b = run(cfg, rp);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a.q[i][0] - b.q[i][0]) < 1e-12);
}

TEST_CASE("deterministic output") {
  const auto cfg = strong(0.5);
  const auto a = run(cfg, params(0.5, 4e-3, 5, 1.0));
  const auto b = run(cfg, params(0.5, 4e-3, 5, 1.0));
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.q[i][0] == b.q[i][0]);
}

TEST_CASE("preconditions") {
  model::ModelConfig cfg;
  // dt above h_r / c.
  CHECK_THROWS_AS(run(cfg, params(0.1, 0.01, 1, 0.0)), PreconditionError);
  // R_max smaller than c T + R_2.
  auto rp = params(1.0, 1e-3, 10, 0.0);
  rp.grid.r_max = 3.0;
  CHECK_THROWS_AS(run(cfg, rp), PreconditionError);
  // Particle driven off the lattice.
  auto drive = cfg;
  drive.potential = model::Potential::linear({5.0, 0.0, 0.0});
  CHECK_THROWS_AS(run(drive, params(2.0, 4e-3, 10, 0.0)), NumericalError);
}

TEST_CASE("stability limit of the chain") {
  model::RadialProfile rho(model::ProfileShape::smooth_bump, 1.0, 1.0);
  for (int n : {3, 4, 5}) {
    const auto s = make_scheme(rho.with_dimension(n), n, 10.0, 1.0 / 16.0, 5.0);
    CHECK(s.max_stable_dt > 0.0);
    CHECK(s.max_stable_dt >= 0.99 * (1.0 / 16.0) / 10.0 / 2.0);
    CHECK(s.source_cells > 0);
  }
}

TEST_CASE("effective equation: linear friction under a constant force") {
  const double g = 0.5, f = 0.1;
  const auto s = effective_trajectory(model::Potential::linear({f, 0.0, 0.0}), g, 3, 0.0, 0.0, 10.0, 1e-3, 100);
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s.p[i][0] == doctest::Approx(f / g * (1.0 - std::exp(-g * s.t[i]))).epsilon(1e-9).scale(1e-12));
  }
}

TEST_CASE("fits on a synthetic series") {
  TimeSeries s;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 0.01 * i;
    s.t.push_back(t);
    s.q.push_back({std::exp(-0.1 * t) * std::cos(2.0 * t), 0, 0});
    s.p.push_back({2.0 - 1.5 * std::exp(-0.4 * t), 0, 0});
  }
  const auto v = fit_dynamics(s, FitKind::asymptotic_velocity, 15.0, 20.0, 2.0);
  CHECK(v.rate == doctest::Approx(0.4).epsilon(1e-6));
  CHECK(v.asymptote == doctest::Approx(2.0).epsilon(1e-8));
  const auto d = fit_dynamics(s, FitKind::decay_rate, 0.0, 20.0);
  CHECK(d.value == doctest::Approx(0.1).epsilon(1e-3));
  CHECK_THROWS_AS(fit_dynamics(s, FitKind::decay_rate, 0.0, 30.0), PreconditionError);
  const std::vector<double> fs{0.1, 0.2, 0.4}, vs{0.3, 0.3 * std::sqrt(2.0), 0.6};
  CHECK(fit_power_exponent(fs, vs).value == doctest::Approx(0.5));
}
