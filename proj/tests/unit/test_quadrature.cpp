#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/error.hpp"
#include "core/model.hpp"
#include "core/quadrature.hpp"
#include "oracles.hpp"

using namespace frictionlab;
using namespace frictionlab::quad;

namespace {

// gamma for d = 1, n = 3 from brute-force transforms.
double gamma_oracle(const model::ModelConfig& cfg) {
  const auto& r1 = cfg.rho1;
  const auto& r2 = cfg.rho2;
  const double rho2_0 = oracle::ft_3d(r2, r2.radius(), 0.0);
  std::vector<double> table;
  const double s_max = 120.0;
  const int n = 24000;
  const double h = s_max / n;
  double integral = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double s = i * h;
    const double f = oracle::ft_1d(r1, r1.radius(), s, 1000);
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    integral += w * s * s * f * f;
  }
  integral *= 4.0 * oracle::pi * h;
  return oracle::pi / std::pow(cfg.c, 3) * rho2_0 * rho2_0 * integral;
}

}  // namespace

TEST_CASE("friction coefficient against brute force") {
  model::ModelConfig cfg;
  const auto rep = friction_coefficient(cfg);
  CHECK(rep.prefactor == doctest::Approx(oracle::pi / 1000.0));
  CHECK(rep.gamma == doctest::Approx(gamma_oracle(cfg)).epsilon(1e-5));
}

TEST_CASE("friction coefficient homogeneity") {
  model::ModelConfig cfg;
  const double g = friction_coefficient(cfg).gamma;
  auto a = cfg;
  a.rho1 = a.rho1.scaled(3.0);
  CHECK(friction_coefficient(a).gamma == doctest::Approx(9.0 * g).epsilon(1e-12));
  auto b = cfg;
  b.c = 5.0;
  CHECK(friction_coefficient(b).gamma == doctest::Approx(8.0 * g).epsilon(1e-12));
}

TEST_CASE("IR integral, n = 3, against a brute-force radial sum") {
  model::RadialProfile rho(model::ProfileShape::smooth_bump, 1.0, 1.0);
  const double sigma = 0.05;
  // 4 pi int_sigma^inf |rho hat(k)|^2 / k dk; ln-spaced near sigma, linear beyond 1.
  const auto f = [&](double k) {
    const double ft = oracle::ft_3d(rho, 1.0, k, 800);
    return ft * ft / k;
  };
  const double low = oracle::trapezoid([&](double u) { const double k = std::exp(u); return f(k) * k; },
                                       std::log(sigma), 0.0, 4000);
  const double high = oracle::trapezoid(f, 1.0, 60.0, 12000);
  const double ref = 4.0 * oracle::pi * (low + high);
  CHECK(ir_integral(rho, 3, sigma) == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("IR integral diverges at sigma = 0 for n = 3 only") {
  model::RadialProfile rho(model::ProfileShape::smooth_bump, 1.0, 1.0);
  CHECK_THROWS_AS(ir_integral(rho, 3, 0.0), DivergenceError);
  CHECK(std::isfinite(ir_integral(rho.with_dimension(4), 4, 0.0)));
  // A zero-mean charge removes the n = 3 divergence.
  model::RadialProfile zm(model::ProfileShape::smooth_bump, 1.0, 1.0, true, 3);
  CHECK(std::isfinite(ir_integral(zm, 3, 0.0)));
}

TEST_CASE("IR band is additive") {
  model::RadialProfile rho(model::ProfileShape::smooth_bump, 1.0, 1.0);
  const double whole = ir_integral(rho, 3, 0.01);
  const double split = ir_band(rho, 3, 0.01, 0.3) + ir_integral(rho, 3, 0.3);
  CHECK(split == doctest::Approx(whole).epsilon(1e-9));
}

TEST_CASE("series classification on synthetic curves") {
  std::vector<double> s, logd, conv, power;
  for (int i = 0; i <= 12; ++i) {
    const double sigma = 0.1 * std::pow(1e-3, i / 12.0);
    s.push_back(sigma);
    logd.push_back(2.0 + 0.7 * std::log(1.0 / sigma));
    conv.push_back(5.0 - 3.0 * sigma);
    power.push_back(1.0 + 0.01 * std::pow(sigma, -1.0));
  }
  CHECK(classify_series(s, logd).classification == IrClass::log_divergent);
  CHECK(classify_series(s, conv).classification == IrClass::convergent);
  CHECK(classify_series(s, power).classification == IrClass::power_divergent);
  const auto fit = classify_series(s, logd);
  CHECK(fit.b == doctest::Approx(0.7).epsilon(1e-8));
  // Less than two decades is refused.
  std::vector<double> s2{0.1, 0.05, 0.02}, v2{1, 2, 3};
  CHECK_THROWS(classify_series(s2, v2));
}

TEST_CASE("displacement norm against brute force") {
  model::RadialProfile rho(model::ProfileShape::smooth_bump, 1.0, 1.0, false, 1);
  const double q = 0.7;
  const double ref = oracle::trapezoid(
      [&](double x) {
        const double d = rho(std::abs(x - q)) - rho(std::abs(x));
        return d * d;
      },
      -2.0, 2.0, 40000);
  CHECK(displacement_norm(rho, 1, q) == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("soft-boson bound is finite above the cutoff and grows as sigma falls") {
  model::ModelConfig cfg;
  const double a = soft_boson_bound(cfg, 0.1), b = soft_boson_bound(cfg, 0.01);
  CHECK(a > 0.0);
  CHECK(b > a);
}

TEST_CASE("box cutoff shape") {
  CHECK(box_cutoff(0.0, 4.0) == 1.0);
  CHECK(box_cutoff(2.0, 4.0) == 1.0);
  CHECK(box_cutoff(3.0, 4.0) == 0.0);
  CHECK(box_cutoff(2.5, 4.0) == doctest::Approx(0.5));
  CHECK(box_cutoff(-2.4, 4.0) == doctest::Approx(box_cutoff(2.4, 4.0)));
}

TEST_CASE("beta coefficients against trapezoid sums") {
  model::RadialProfile rho(model::ProfileShape::smooth_bump, 1.0, 1.0, false, 1);
  const double L = 12.0, q = 0.4;
  for (int label : {0, 3, -3, 7}) {
    const auto e = [&](double x) {
      if (label == 0) return 1.0 / std::sqrt(2.0 * L);
      const double k = oracle::pi * std::abs(label) / L;
      return (label > 0 ? std::cos(k * x) : std::sin(k * x)) / std::sqrt(L);
    };
    const double ref =
        oracle::trapezoid([&](double x) { return e(x) * rho(std::abs(x - q)); }, q - 1.0, q + 1.0, 20000);
    CHECK(beta_coefficient(rho, L, label, q) == doctest::Approx(ref).epsilon(1e-8).scale(1e-12));
  }
}

TEST_CASE("shell collapse preserves the weight integral") {
  model::ModelConfig cfg;
  cfg.rho1 = cfg.rho1.scaled(0.2);
  const auto basis = model::build_particle_basis(cfg.potential, {}, 3);
  DiscretizationSpec spec;
  spec.shells = 7;
  const auto modes = discretize_modes(cfg, basis, spec);
  double sum = 0.0;
  for (const auto& s : modes.shells) sum += s.weight * s.weight;
  CHECK(sum == doctest::Approx(shell_sum_rule_oracle(cfg, spec)).epsilon(1e-8));
  CHECK(modes.size() == modes.shells.size() * modes.spatial.size());
  // Spatial couplings are symmetric matrices over the particle levels.
  for (const auto& m : modes.modes) CHECK((m.coupling - m.coupling.transpose()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("restricted support zeroes the far labels") {
  model::ModelConfig cfg;
  const auto basis = model::build_particle_basis(cfg.potential, {}, 2);
  DiscretizationSpec spec;
  spec.max_label = 3;
  spec.shells = 2;
  const auto full = discretize_modes(cfg, basis, spec);
  const auto cut = full.restricted_support(1);
  for (std::size_t j = 0; j < cut.size(); ++j) {
    const int label = cut.spatial[cut.modes[j].spatial].label;
    if (std::abs(label) > 1) CHECK(cut.modes[j].coupling.cwiseAbs().maxCoeff() == 0.0);
    else CHECK(cut.modes[j].coupling.isApprox(full.modes[j].coupling));
  }
}

TEST_CASE("tail decay power of exact power laws") {
  std::vector<double> v{1.0};
  for (int p = 1; p <= 20; ++p) v.push_back(std::pow(p, -5.0));
  const auto fit = tail_decay_power(v, 1);
  CHECK(fit.power == doctest::Approx(5.0).epsilon(1e-10));
  CHECK(fit.r2 == doctest::Approx(1.0));
}
