#pragma once

#include <functional>
#include <span>
#include <vector>

namespace frictionlab::integrate {

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-8;
  unsigned max_depth = 18;
};

// Adaptive Gauss-Kronrod (7/15) on [a, b]. Throws NumericalError when the
// error estimate stays above max(abs, rel * |I|) at max depth.
double adaptive(const std::function<double(double)>& f, double a, double b,
                const Tolerance& tol = {});

// Sum of adaptive integrals over consecutive panels [edges[i], edges[i+1]].
// The absolute tolerance is shared between panels.
double panels(const std::function<double(double)>& f, std::span<const double> edges,
              const Tolerance& tol = {});

// Panel edges of width at most `width` covering [a, b].
std::vector<double> uniform_edges(double a, double b, double width);

// Geometric edges a = e_0 < ... < e_count = b (requires 0 < a < b).
std::vector<double> geometric_edges(double a, double b, std::size_t count);

}  // namespace frictionlab::integrate
