#include "core/fit.hpp"

#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace frictionlab::fit {

LinearFit linear(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw PreconditionError("linear fit needs >= 2 paired points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit out;
  out.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  out.intercept = my - out.slope * mx;
  std::vector<double> predicted(n);
  for (std::size_t i = 0; i < n; ++i) predicted[i] = out.intercept + out.slope * x[i];
  out.r2 = r_squared(y, predicted);
  return out;
}

double r_squared(std::span<const double> y, std::span<const double> predicted) {
  const std::size_t n = y.size();
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(n);
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_tot += (y[i] - mean) * (y[i] - mean);
    ss_res += (y[i] - predicted[i]) * (y[i] - predicted[i]);
  }
  if (ss_tot <= 0.0) return ss_res <= 0.0 ? 1.0 : 0.0;
  return std::max(0.0, 1.0 - ss_res / ss_tot);
}

namespace {

// Least squares of y on [1, exp(-rate (t - t0))] for fixed rate.
ExponentialApproach project(std::span<const double> t, std::span<const double> y, double rate) {
  const std::size_t n = t.size();
  std::vector<double> basis(n);
  for (std::size_t i = 0; i < n; ++i) basis[i] = std::exp(-rate * (t[i] - t[0]));
  const LinearFit lf = linear(basis, y);
  ExponentialApproach out;
  out.asymptote = lf.intercept;
  out.amplitude = -lf.slope;
  out.rate = rate;
  out.r2 = lf.r2;
  return out;
}

double residual(std::span<const double> t, std::span<const double> y, double rate) {
  const ExponentialApproach e = project(t, y, rate);
  double ss = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double model = e.asymptote - e.amplitude * std::exp(-rate * (t[i] - t[0]));
    ss += (y[i] - model) * (y[i] - model);
  }
  return ss;
}

}  // namespace

ExponentialApproach exponential_approach(std::span<const double> t, std::span<const double> y,
                                         double rate_min, double rate_max) {
  if (t.size() != y.size() || t.size() < 4) {
    throw PreconditionError("exponential fit needs >= 4 paired points");
  }
  const double lo = std::log(rate_min);
  const double hi = std::log(rate_max);
  constexpr int kScan = 240;
  int best = 0;
  double best_ss = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double ss = residual(t, y, std::exp(lo + (hi - lo) * i / kScan));
    if (ss < best_ss) {
      best_ss = ss;
      best = i;
    }
  }
  const double a = lo + (hi - lo) * std::max(0, best - 1) / kScan;
  const double b = lo + (hi - lo) * std::min(kScan, best + 1) / kScan;
  const auto objective = [&](double log_rate) { return residual(t, y, std::exp(log_rate)); };
  const auto [log_rate, ss] = boost::math::tools::brent_find_minima(objective, a, b, 52);
  (void)ss;
  return project(t, y, std::exp(log_rate));
}

EnvelopeDecay envelope_decay(std::span<const double> t, std::span<const double> y,
                             double center) {
  const std::size_t n = t.size();
  if (n != y.size() || n < 5) throw PreconditionError("envelope fit needs >= 5 paired points");
  std::vector<double> peak_t, peak_log;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = std::abs(y[i - 1] - center);
    const double b = std::abs(y[i] - center);
    const double c = std::abs(y[i + 1] - center);
    if (!(b > a && b >= c) || b <= 0.0) continue;
    // Parabola through the three samples (uniform spacing assumed locally).
    const double h = t[i + 1] - t[i];
    const double denom = a - 2.0 * b + c;
    double shift = 0.0, value = b;
    if (denom < 0.0) {
      shift = 0.5 * (a - c) / denom;
      value = b - 0.25 * (a - c) * shift;
    }
    peak_t.push_back(t[i] + shift * h);
    peak_log.push_back(std::log(value));
  }
  if (peak_t.size() < 2) throw NumericalError("envelope fit found fewer than two peaks");
  const LinearFit lf = linear(peak_t, peak_log);
  EnvelopeDecay out;
  out.rate = -lf.slope;
  out.r2 = lf.r2;
  out.peaks = peak_t.size();
  return out;
}

}  // namespace frictionlab::fit
