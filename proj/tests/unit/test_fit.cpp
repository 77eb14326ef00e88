#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "core/fit.hpp"

using namespace frictionlab::fit;

TEST_CASE("linear least squares") {
  std::vector<double> x{0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(1.5 - 0.25 * v);
  const auto f = linear(x, y);
  CHECK(f.intercept == doctest::Approx(1.5));
  CHECK(f.slope == doctest::Approx(-0.25));
  CHECK(f.r2 == doctest::Approx(1.0));
  // Noise lowers r2 below one but keeps the slope close.
  std::mt19937 rng(3);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> yn;
  for (double v : y) yn.push_back(v + noise(rng));
  const auto g = linear(x, yn);
  CHECK(g.r2 < 1.0);
  CHECK(g.slope == doctest::Approx(-0.25).epsilon(0.2));
}

TEST_CASE("r squared edge cases") {
  std::vector<double> y{2, 2, 2};
  CHECK(r_squared(y, y) == 1.0);
  std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  // Worse than the mean is clamped to zero.
  CHECK(r_squared(a, b) == 0.0);
}

TEST_CASE("exponential approach recovers its parameters") {
  std::vector<double> t, y;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(2.0 + 0.05 * i);
    y.push_back(0.8 - 0.6 * std::exp(-0.37 * (t.back() - 2.0)));
  }
  const auto f = exponential_approach(t, y);
  CHECK(f.rate == doctest::Approx(0.37).epsilon(1e-6));
  CHECK(f.asymptote == doctest::Approx(0.8).epsilon(1e-8));
  CHECK(f.amplitude == doctest::Approx(0.6).epsilon(1e-6));
  CHECK(f.r2 == doctest::Approx(1.0));
}

TEST_CASE("envelope decay of a damped cosine") {
  std::vector<double> t, y;
  const double rate = 0.21, w = 1.9;
  for (int i = 0; i <= 3000; ++i) {
    t.push_back(0.01 * i);
    y.push_back(0.5 + std::exp(-rate * t.back()) * std::cos(w * t.back() + 0.3));
  }
  const auto f = envelope_decay(t, y, 0.5);
  CHECK(f.rate == doctest::Approx(rate).epsilon(1e-3));
  CHECK(f.peaks >= 15);
  CHECK(f.r2 > 0.999);
}
