#include "core/integrate.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "core/error.hpp"

namespace frictionlab::integrate {

namespace {

struct Panel {
  double value;
  double error;
  double l1;
};

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg{
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

Panel kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod_sum = fc * kWgk[7];
  double gauss_sum = fc * kWg[3];
  double l1 = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod_sum += kWgk[j] * (f1 + f2);
    l1 += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss_sum += kWg[j / 2] * (f1 + f2);
  }
  Panel p{};
  p.value = kronrod_sum * half;
  p.l1 = l1 * std::abs(half);
  p.error = std::abs((kronrod_sum - gauss_sum) * half);
  // Roundoff floor relative to the panel's own magnitude.
  p.error = std::max(p.error, 50.0 * std::numeric_limits<double>::epsilon() * p.l1) -
            50.0 * std::numeric_limits<double>::epsilon() * p.l1;
  return p;
}

// Bisects until the local error is below the share of `budget` proportional
// to the panel width.
double refine(const std::function<double(double)>& f, double a, double b, const Panel& whole,
              double budget_density, unsigned depth, bool& converged) {
  const double allowed = budget_density * (b - a);
  if (whole.error <= allowed || depth == 0) {
    if (whole.error > allowed) converged = false;
    return whole.value;
  }
  const double mid = 0.5 * (a + b);
  const Panel left = kronrod(f, a, mid);
  const Panel right = kronrod(f, mid, b);
  return refine(f, a, mid, left, budget_density, depth - 1, converged) +
         refine(f, mid, b, right, budget_density, depth - 1, converged);
}

}  // namespace

double adaptive(const std::function<double(double)>& f, double a, double b,
                const Tolerance& tol) {
  if (a == b) return 0.0;
  const Panel whole = kronrod(f, a, b);
  const double budget = std::max(tol.abs, tol.rel * whole.l1);
  bool converged = true;
  const double value = refine(f, a, b, whole, budget / (b - a), tol.max_depth, converged);
  if (!std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-finite integral on [" << a << ", " << b << "]";
    throw NumericalError(msg.str());
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "adaptive quadrature did not converge on [" << a << ", " << b << "]";
    throw NumericalError(msg.str());
  }
  return value;
}

double panels(const std::function<double(double)>& f, std::span<const double> edges,
              const Tolerance& tol) {
  if (edges.size() < 2) return 0.0;
  Tolerance local = tol;
  local.abs = tol.abs / static_cast<double>(edges.size() - 1);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    sum += adaptive(f, edges[i], edges[i + 1], local);
  }
  return sum;
}

std::vector<double> uniform_edges(double a, double b, double width) {
  std::vector<double> edges;
  if (!(b > a)) {
    edges.push_back(a);
    return edges;
  }
  const auto count = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / width)));
  edges.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) {
    edges.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(count));
  }
  edges.back() = b;
  return edges;
}

std::vector<double> geometric_edges(double a, double b, std::size_t count) {
  std::vector<double> edges(count + 1);
  const double ratio = std::log(b / a);
  for (std::size_t i = 0; i <= count; ++i) {
    edges[i] = a * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count));
  }
  edges.front() = a;
  edges.back() = b;
  return edges;
}

}  // namespace frictionlab::integrate
