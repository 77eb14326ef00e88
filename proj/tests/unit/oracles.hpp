#pragma once

// Brute-force reference computations shared by the unit tests. They use plain
// trapezoid sums on fine grids and nothing from the library beyond the
// profile's point values.

#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

inline double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

// (2 pi)^{-1/2} int rho(|x|) cos(k x) dx on [-R, R].
inline double ft_1d(const std::function<double(double)>& rho, double radius, double k, int n = 4000) {
  return trapezoid([&](double x) { return rho(std::abs(x)) * std::cos(k * x); }, -radius, radius, n) /
         std::sqrt(2.0 * pi);
}

// (2 pi)^{-3/2} 4 pi int r^2 rho(r) sin(k r) / (k r) dr.
inline double ft_3d(const std::function<double(double)>& rho, double radius, double k, int n = 4000) {
  const auto g = [&](double r) {
    const double x = k * r;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return r * r * rho(r) * sinc;
  };
  return 4.0 * pi * trapezoid(g, 0.0, radius, n) / std::pow(2.0 * pi, 1.5);
}

}  // namespace oracle
