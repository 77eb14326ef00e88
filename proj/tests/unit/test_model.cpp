#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/error.hpp"
#include "core/model.hpp"
#include "oracles.hpp"

using namespace frictionlab;
using namespace frictionlab::model;

TEST_CASE("smooth bump values and support") {
  RadialProfile p(ProfileShape::smooth_bump, 2.0, 3.0);
  CHECK(p(0.0) == doctest::Approx(3.0));
  CHECK(p(1.0) == doctest::Approx(3.0 * std::exp(1.0 - 4.0 / 3.0)));
  CHECK(p(2.0) == 0.0);
  CHECK(p(5.0) == 0.0);
  // Derivative against a central difference.
  const double h = 1e-6;
  CHECK(p.derivative(1.3) == doctest::Approx((p(1.3 + h) - p(1.3 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("polynomial bump values") {
  RadialProfile p(ProfileShape::polynomial_bump, 1.0, 2.0);
  CHECK(p(0.5) == doctest::Approx(2.0 * std::pow(0.75, 3)));
  CHECK(p(1.0) == 0.0);
}

TEST_CASE("zero-mean profiles integrate to zero") {
  for (int dim : {1, 3}) {
    RadialProfile p(ProfileShape::smooth_bump, 1.0, 1.0, true, dim);
    CHECK(std::abs(volume_integral(p, dim)) < 1e-12);
    CHECK(std::abs(radial_fourier(p, dim, 0.0)) < 1e-10);
  }
}

TEST_CASE("sphere areas") {
  CHECK(sphere_area(1) == doctest::Approx(2.0));
  CHECK(sphere_area(2) == doctest::Approx(2.0 * oracle::pi));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * oracle::pi));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * oracle::pi * oracle::pi));
}

TEST_CASE("spherical kernel closed forms") {
  for (double x : {0.0, 1e-4, 0.3, 2.0, 17.0}) {
    CHECK(spherical_kernel(1, x) == doctest::Approx(std::cos(x)).epsilon(1e-12));
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
    CHECK(spherical_kernel(3, x) == doctest::Approx(sinc).epsilon(1e-12));
  }
  // 1 - cos x for tiny x without cancellation.
  CHECK(kernel_complement(1, 1e-6) == doctest::Approx(0.5e-12).epsilon(1e-8));
}

TEST_CASE("radial Fourier transform against trapezoid sums") {
  RadialProfile p(ProfileShape::smooth_bump, 1.0, 1.0);
  for (double k : {0.0, 0.5, 3.0, 11.0}) {
    const double ref1 = oracle::ft_1d(p, 1.0, k);
    const double ref3 = oracle::ft_3d(p, 1.0, k);
    CHECK(radial_fourier(p.with_dimension(1), 1, k) == doctest::Approx(ref1).epsilon(1e-8).scale(1e-10));
    CHECK(radial_fourier(p, 3, k) == doctest::Approx(ref3).epsilon(1e-8).scale(1e-10));
  }
  // Table and direct integration agree for every supported dimension.
  for (int nu = 1; nu <= 5; ++nu) {
    for (double k : {0.2, 4.0, 25.0}) {
      CHECK(radial_fourier(p, nu, k) ==
            doctest::Approx(radial_fourier_direct(p, nu, k)).epsilon(1e-8).scale(1e-12));
    }
  }
}

TEST_CASE("Parseval: int |rho|^2 = int |rho hat|^2") {
  RadialProfile p(ProfileShape::polynomial_bump, 1.0, 1.0, false, 1);
  const double lhs = volume_integral(p, 1, 2);
  // rho hat is even; the polynomial bump's transform decays like k^-4.
  const double rhs = 2.0 * oracle::trapezoid(
                               [&](double k) {
                                 const double f = radial_fourier(p, 1, k);
                                 return f * f;
                               },
                               0.0, 400.0, 40000);
  CHECK(rhs == doctest::Approx(lhs).epsilon(1e-6));
}

TEST_CASE("harmonic particle spectrum") {
  // -d^2/dq^2 + q^2/2 has E_a = (2a + 1) / sqrt(2).
  const auto basis = build_particle_basis(Potential::harmonic(1.0), {}, 4);
  for (std::size_t a = 0; a < 4; ++a) {
    CHECK(basis.energies()(static_cast<Eigen::Index>(a)) ==
          doctest::Approx((2.0 * a + 1.0) / std::sqrt(2.0)).epsilon(1e-6));
  }
  // Grid-weighted orthonormality.
  const Eigen::MatrixXd gram = basis.spacing() * basis.vectors().transpose() * basis.vectors();
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  // <0|Q^2|0> = 1 / sqrt(2) for this oscillator.
  const auto q2 = basis.multiplication_matrix([](double x) { return x * x; });
  CHECK(q2(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-6));
}

TEST_CASE("non-confining potential is rejected") {
  CHECK_THROWS_AS(build_particle_basis(Potential::linear({1.0, 0.0, 0.0}), {}, 3), PreconditionError);
}

TEST_CASE("config validation") {
  ModelConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.c = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("zero-mean transform near k = 0") {
  for (int nu : {1, 3, 4}) {
    RadialProfile p(ProfileShape::smooth_bump, 1.0, 1.0, true, nu);
    // Both sides of the switch to the small-k series agree with the direct integral.
    for (double k : {0.03, 0.049, 0.051}) {
      CHECK(radial_fourier(p, nu, k) == doctest::Approx(radial_fourier_direct(p, nu, k)).epsilon(1e-7));
    }
    // Quadratic onset: halving k quarters the transform.
    const double a = radial_fourier(p, nu, 1e-6), b = radial_fourier(p, nu, 5e-7);
    CHECK(a / b == doctest::Approx(4.0).epsilon(1e-6));
  }
}
