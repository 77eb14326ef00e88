#pragma once

#include <span>
#include <vector>

namespace frictionlab::fit {

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r2 = 0.0;
};

// Ordinary least squares y = intercept + slope * x.
LinearFit linear(std::span<const double> x, std::span<const double> y);

// Coefficient of determination; 1 when y has zero variance and is reproduced.
double r_squared(std::span<const double> y, std::span<const double> predicted);

// y(t) = asymptote - amplitude * exp(-rate (t - t[0])), fitted by variable
// projection over log(rate) in [rate_min, rate_max].
struct ExponentialApproach {
  double asymptote = 0.0;
  double amplitude = 0.0;
  double rate = 0.0;
  double r2 = 0.0;
};

ExponentialApproach exponential_approach(std::span<const double> t, std::span<const double> y,
                                         double rate_min = 1e-4, double rate_max = 1e3);

// Local maxima of |y - center| refined by three-point parabolic interpolation,
// then a straight-line fit of log(peak) against peak time; rate = -slope.
struct EnvelopeDecay {
  double rate = 0.0;
  double r2 = 0.0;
  std::size_t peaks = 0;
};

EnvelopeDecay envelope_decay(std::span<const double> t, std::span<const double> y,
                             double center = 0.0);

}  // namespace frictionlab::fit
