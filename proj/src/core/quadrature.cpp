#include "core/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "core/error.hpp"
#include "core/fit.hpp"
#include "core/integrate.hpp"

namespace frictionlab::quad {

namespace {

constexpr double kPi = std::numbers::pi;

using Weight = std::function<double(double)>;

double k_of_omega(double omega, double mass) {
  return std::sqrt(std::max(0.0, omega * omega - mass * mass));
}

// S_{D-1} int_{k_lo}^{k_hi} k^{D-1} |hat rho^{(nu)}(k)|^2 w(k) dk, with the
// nu-dimensional transform and a D-dimensional radial measure. k_hi = inf
// integrates until the tail is negligible.
double spectral_integral(const model::RadialProfile& profile, int nu, int measure_dim,
                         double k_lo, double k_hi, const Weight& weight) {
  const double radius = profile.radius();
  const auto integrand = [&](double k) {
    const double ft = model::radial_fourier(profile, nu, k);
    return std::pow(k, measure_dim - 1) * ft * ft * weight(k);
  };
  const integrate::Tolerance tol{1e-300, 1e-11, 20};

  // Geometric panels resolve a 1/k-type singularity near k_lo; uniform panels
  // of a quarter period past 1/R follow the oscillations of the transform.
  const double k_knee = 1.0 / radius;
  const double k_stop = std::min(k_hi, (nu == 1 || nu == 3 ? 400.0 : 200.0) / radius);
  std::vector<double> edges;
  double start = k_lo;
  if (start < k_knee && start < k_stop) {
    if (start <= 0.0) {
      edges.push_back(0.0);
      start = 1e-9 * k_knee;
    }
    const double stop = std::min(k_knee, k_stop);
    const auto decades = std::max(1.0, std::ceil(8.0 * std::log10(stop / start)));
    const auto geo = integrate::geometric_edges(start, stop, static_cast<std::size_t>(decades));
    edges.insert(edges.end(), geo.begin(), geo.end());
  } else {
    edges.push_back(start);
  }

  double sum = 0.0;
  std::size_t first = 0;
  if (edges.size() > 1 && edges[0] == 0.0) {
    // [0, s] with s = 1e-9 / R: the integrand is a power law k^p there, and
    // for zero-mean charges transform round-off would make it look singular.
    const double s = edges[1], fs = integrand(s), fh = integrand(0.5 * s);
    const double p = (fs > 0.0 && fh > 0.0) ? std::log2(fs / fh) : 0.0;
    if (p > -1.0 + 1e-6) sum += fs * s / (p + 1.0);
    first = 1;
  }
  for (std::size_t i = first; i + 1 < edges.size(); ++i) {
    sum += integrate::adaptive(integrand, edges[i], edges[i + 1], tol);
  }
  double a = edges.back();
  const double width = 0.5 * kPi / radius;
  int quiet_panels = 0;
  while (a < k_stop) {
    const double b = std::min(k_stop, a + width);
    // The transform itself is only good to ~1e-15 absolute, so tail panels get
    // an absolute budget tied to what has accumulated so far.
    integrate::Tolerance tail = tol;
    tail.abs = std::max(tol.abs, 1e-13 * std::abs(sum));
    const double part = integrate::adaptive(integrand, a, b, tail);
    sum += part;
    a = b;
    if (std::isinf(k_hi) && a > 8.0 / radius) {
      quiet_panels = std::abs(part) < 1e-16 * std::abs(sum) ? quiet_panels + 1 : 0;
      if (quiet_panels >= 4) break;
    }
  }
  return model::sphere_area(measure_dim) * sum;
}

bool ir_singular(const model::RadialProfile& rho2, int n, double k_lo,
                 const model::DispersionSpec& dispersion) {
  if (n != 3 || dispersion.mass > 0.0 || k_lo > 0.0) return false;
  return std::abs(model::radial_fourier(rho2, n, 0.0)) > fourier_zero_tolerance(rho2, n);
}

}  // namespace

GammaReport friction_coefficient(const model::ModelConfig& config) {
  config.validate();
  GammaReport out;
  out.prefactor = kPi / (config.c * config.c * config.c);
  out.rho2_hat_zero = model::radial_fourier(config.rho2, config.n, 0.0);
  const int measure_dim = config.n + config.d - 1;
  out.momentum_integral =
      spectral_integral(config.rho1, config.d, measure_dim, 0.0,
                        std::numeric_limits<double>::infinity(), [](double) { return 1.0; });
  out.gamma = out.prefactor * out.rho2_hat_zero * out.rho2_hat_zero * out.momentum_integral;
  return out;
}

double fourier_zero_tolerance(const model::RadialProfile& profile, int nu) {
  return 1e-10 * std::abs(profile.amplitude()) * std::pow(profile.radius(), nu);
}

double ir_integral(const model::RadialProfile& rho2, int n, double sigma,
                   const model::DispersionSpec& dispersion) {
  if (sigma < 0.0) throw PreconditionError("infrared cutoff must be non-negative");
  const double k_lo = k_of_omega(sigma, dispersion.mass);
  if (ir_singular(rho2, n, k_lo, dispersion)) {
    throw DivergenceError(
        "infrared integral diverges: n = 3, massless bosons, hat rho_2(0) != 0 and sigma = 0");
  }
  return spectral_integral(rho2, n, n, k_lo, std::numeric_limits<double>::infinity(),
                           [&](double k) {
                             const double w = dispersion.omega(k);
                             return 1.0 / (w * w * w);
                           });
}

double ir_band(const model::RadialProfile& rho2, int n, double sigma_lo, double sigma_hi,
               const model::DispersionSpec& dispersion) {
  if (!(sigma_hi > sigma_lo)) return 0.0;
  const double k_lo = k_of_omega(sigma_lo, dispersion.mass);
  const double k_hi = k_of_omega(sigma_hi, dispersion.mass);
  if (ir_singular(rho2, n, k_lo, dispersion)) {
    throw DivergenceError("infrared band integral diverges at sigma = 0");
  }
  return spectral_integral(rho2, n, n, k_lo, k_hi, [&](double k) {
    const double w = dispersion.omega(k);
    return 1.0 / (w * w * w);
  });
}

std::string_view to_string(IrClass c) {
  switch (c) {
    case IrClass::convergent:
      return "convergent";
    case IrClass::log_divergent:
      return "log_divergent";
    case IrClass::power_divergent:
      return "power_divergent";
  }
  return "unknown";
}

double IrReport::model_value(double sigma) const {
  switch (classification) {
    case IrClass::convergent:
      return a + b * std::pow(sigma, exponent);
    case IrClass::log_divergent:
      return a + b * std::log(1.0 / sigma);
    case IrClass::power_divergent:
      return a + b * std::pow(sigma, -exponent);
  }
  return a;
}

namespace {

struct ModelFit {
  double a = 0.0, b = 0.0, exponent = 0.0, r2 = 0.0;
};

// Best a + b * sigma^e over e in [lo, hi]; sign_required = +1 / -1 constrains b.
ModelFit scan_power(std::span<const double> sigmas, std::span<const double> values, double lo,
                    double hi, double sign_of_exponent, int sign_required) {
  ModelFit best;
  std::vector<double> x(sigmas.size());
  for (double e = lo; e <= hi + 1e-12; e += 0.01) {
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      x[i] = std::pow(sigmas[i], sign_of_exponent * e);
    }
    const fit::LinearFit lf = fit::linear(x, values);
    if (lf.slope * sign_required <= 0.0) continue;
    if (lf.r2 > best.r2) best = {lf.intercept, lf.slope, e, lf.r2};
  }
  return best;
}

}  // namespace

IrReport classify_series(std::span<const double> sigmas, std::span<const double> values) {
  if (sigmas.size() != values.size() || sigmas.size() < 4) {
    throw PreconditionError("classification needs >= 4 (sigma, value) pairs");
  }
  const auto [mn, mx] = std::minmax_element(sigmas.begin(), sigmas.end());
  if (!(*mn > 0.0) || *mx / *mn < 100.0 * (1.0 - 1e-12)) {
    throw PreconditionError("sigma grid must be positive and span at least two decades");
  }
  IrReport report;
  report.sigma_values.assign(sigmas.begin(), sigmas.end());
  report.integral_values.assign(values.begin(), values.end());

  const auto [vmin, vmax] = std::minmax_element(values.begin(), values.end());
  const double scale = std::max(std::abs(*vmin), std::abs(*vmax));
  if (*vmax - *vmin <= 1e-9 * scale) {
    // Flat to quadrature precision: converged.
    double mean = 0.0;
    for (double v : values) mean += v;
    report.classification = IrClass::convergent;
    report.a = mean / static_cast<double>(values.size());
    report.fit_r2 = report.r2_convergent = 1.0;
    return report;
  }

  std::vector<double> log_x(sigmas.size());
  for (std::size_t i = 0; i < sigmas.size(); ++i) log_x[i] = std::log(1.0 / sigmas[i]);
  const fit::LinearFit log_fit = fit::linear(log_x, values);
  report.r2_log = log_fit.slope > 0.0 ? log_fit.r2 : 0.0;

  const ModelFit power = scan_power(sigmas, values, 0.25, 3.0, -1.0, +1);
  const ModelFit conv = scan_power(sigmas, values, 0.5, 4.0, +1.0, -1);
  report.r2_power = power.r2;
  report.r2_convergent = conv.r2;

  struct Candidate {
    IrClass cls;
    double r2;
  };
  std::array<Candidate, 3> ranked{{{IrClass::convergent, conv.r2},
                                   {IrClass::log_divergent, report.r2_log},
                                   {IrClass::power_divergent, power.r2}}};
  std::sort(ranked.begin(), ranked.end(),
            [](const Candidate& x, const Candidate& y) { return x.r2 > y.r2; });
  const Candidate& winner = ranked[0];
  if (!(winner.r2 > kClassifyMinR2) || winner.r2 - ranked[1].r2 <= kClassifyMargin) {
    std::ostringstream msg;
    msg << "ambiguous infrared classification: r2 convergent=" << conv.r2
        << " log=" << report.r2_log << " power=" << power.r2;
    throw AmbiguousFitError(msg.str());
  }
  report.classification = winner.cls;
  report.fit_r2 = winner.r2;
  switch (winner.cls) {
    case IrClass::convergent:
      report.a = conv.a;
      report.b = conv.b;
      report.exponent = conv.exponent;
      break;
    case IrClass::log_divergent:
      report.a = log_fit.intercept;
      report.b = log_fit.slope;
      break;
    case IrClass::power_divergent:
      report.a = power.a;
      report.b = power.b;
      report.exponent = power.exponent;
      break;
  }
  return report;
}

IrReport classify_ir(const model::RadialProfile& rho2, int n, std::span<const double> sigmas,
                     const model::DispersionSpec& dispersion) {
  std::vector<double> values;
  values.reserve(sigmas.size());
  for (double s : sigmas) values.push_back(ir_integral(rho2, n, s, dispersion));
  return classify_series(sigmas, values);
}

std::string_view to_string(DressedModel m) {
  return m == DressedModel::membrane ? "membrane" : "nelson";
}

double displacement_norm(const model::RadialProfile& rho1, int d, double q) {
  q = std::abs(q);
  if (q == 0.0) return 0.0;
  // |hat rho_1|^2 |exp(-i k.q) - 1|^2 averaged over directions of k.
  return spectral_integral(rho1, d, d, 0.0, std::numeric_limits<double>::infinity(),
                           [&](double k) { return 2.0 * model::kernel_complement(d, k * q); });
}

double dressed_ir(DressedModel kind, const model::ModelConfig& config, double q, double sigma) {
  config.validate();
  if (sigma < 0.0) throw PreconditionError("infrared cutoff must be non-negative");
  q = std::abs(q);
  if (kind == DressedModel::membrane) {
    const double x_factor = displacement_norm(config.rho1, config.d, q);
    if (x_factor == 0.0) return 0.0;
    return x_factor * ir_integral(config.rho2, config.n, sigma, config.dispersion);
  }
  if (q == 0.0) return 0.0;
  const auto& disp = config.dispersion;
  const double k_lo = k_of_omega(sigma, disp.mass);
  const model::RadialProfile charge = config.rho2.with_dimension(config.d);
  if (config.d == 1 && disp.mass == 0.0 && k_lo == 0.0 &&
      std::abs(model::radial_fourier(charge, 1, 0.0)) > fourier_zero_tolerance(charge, 1)) {
    throw DivergenceError("dressed Nelson integral diverges for d = 1 at sigma = 0");
  }
  return spectral_integral(charge, config.d, config.d, k_lo,
                           std::numeric_limits<double>::infinity(), [&](double k) {
                             const double w = disp.omega(k);
                             return 2.0 * model::kernel_complement(config.d, k * q) /
                                    (w * w * w);
                           });
}

IrReport classify_dressed(DressedModel kind, const model::ModelConfig& config, double q,
                          std::span<const double> sigmas) {
  std::vector<double> values;
  values.reserve(sigmas.size());
  for (double s : sigmas) values.push_back(dressed_ir(kind, config, q, s));
  return classify_series(sigmas, values);
}

double soft_boson_bound(const model::ModelConfig& config, double sigma) {
  const double norm2 = model::volume_integral(config.rho1, config.d, 2);
  return 0.5 * norm2 * ir_integral(config.rho2, config.n, sigma, config.dispersion);
}

// ---------------------------------------------------------------------------

ModeSet ModeSet::scalar(std::span<const double> omegas, std::span<const double> couplings,
                        std::size_t particle_dim) {
  if (omegas.size() != couplings.size()) {
    throw PreconditionError("scalar mode set: omega / coupling count mismatch");
  }
  ModeSet out;
  out.particle_dim = particle_dim;
  for (std::size_t j = 0; j < omegas.size(); ++j) {
    if (!(omegas[j] > 0.0)) throw PreconditionError("mode frequencies must be positive");
    Shell shell;
    shell.omega = shell.omega_lo = shell.omega_hi = omegas[j];
    shell.weight = couplings[j];
    out.shells.push_back(shell);
    Mode mode;
    mode.shell = j;
    mode.omega = omegas[j];
    mode.coupling = couplings[j] * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(particle_dim),
                                                             static_cast<Eigen::Index>(particle_dim));
    out.modes.push_back(std::move(mode));
  }
  return out;
}

ModeSet ModeSet::restricted_support(int max_label) const {
  ModeSet out = *this;
  for (auto& mode : out.modes) {
    if (mode.spatial < spatial.size() && std::abs(spatial[mode.spatial].label) > max_label) {
      mode.coupling.setZero();
    }
  }
  return out;
}

ModeSet ModeSet::scaled(double factor) const {
  ModeSet out = *this;
  for (auto& mode : out.modes) mode.coupling *= factor;
  for (auto& s : out.spatial) {
    s.coupling *= factor;
    s.coupling_norm *= std::abs(factor);
  }
  return out;
}

double box_cutoff(double x, double box) {
  const double t = std::abs(x) / box;
  if (t <= 0.5) return 1.0;
  if (t >= 0.75) return 0.0;
  const auto f = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
  const double u = (0.75 - t) / 0.25;
  return f(u) / (f(u) + f(1.0 - u));
}

namespace {

double basis_function(int label, double x, double box) {
  if (label == 0) return 1.0 / std::sqrt(2.0 * box);
  const double kappa = kPi * std::abs(label) / box;
  const double norm = 1.0 / std::sqrt(box);
  return label > 0 ? norm * std::cos(kappa * x) : norm * std::sin(kappa * x);
}

}  // namespace

double beta_coefficient(const model::RadialProfile& rho1, double box, int label, double q) {
  const double r1 = rho1.radius();
  const double lo = std::max(-box, q - r1);
  const double hi = std::min(box, q + r1);
  if (!(hi > lo)) return 0.0;
  const auto integrand = [&](double x) {
    return basis_function(label, x, box) * rho1(x - q) * box_cutoff(x, box);
  };
  const auto edges = integrate::uniform_edges(lo, hi, r1 / 8.0);
  const integrate::Tolerance tol{1e-15 * std::abs(rho1.amplitude()) * r1, 1e-12, 16};
  return integrate::panels(integrand, edges, tol);
}

double default_k_max(const model::RadialProfile& rho2, int n) {
  const double radius = rho2.radius();
  const double width = 0.5 * kPi / radius;
  const auto integrand = [&](double k) {
    const double ft = model::radial_fourier(rho2, n, k);
    return std::pow(k, n - 2) * ft * ft;
  };
  const double k_stop = 200.0 / radius;
  std::vector<double> cumulative{0.0};
  std::vector<double> knots{0.0};
  for (double a = 0.0; a < k_stop; a += width) {
    const double b = std::min(k_stop, a + width);
    cumulative.push_back(cumulative.back() + integrate::adaptive(integrand, a, b));
    knots.push_back(b);
  }
  const double total = cumulative.back();
  for (std::size_t i = 0; i < knots.size(); ++i) {
    if (total - cumulative[i] < 1e-8 * total) return knots[i];
  }
  return k_stop;
}

namespace {

struct ShellGrid {
  std::vector<double> edges;  // in omega
  double omega_max = 0.0;
};

ShellGrid shell_grid(const model::ModelConfig& config, const DiscretizationSpec& spec) {
  const double mass = config.dispersion.mass;
  const double k_max = spec.k_max > 0.0 ? spec.k_max : default_k_max(config.rho2, config.n);
  ShellGrid grid;
  grid.omega_max = config.dispersion.omega(k_max);
  double first = spec.omega_min > 0.0 ? spec.omega_min : std::max(mass, config.sigma);
  if (first >= grid.omega_max || spec.shells == 0) return grid;
  bool from_zero = false;
  if (first <= 0.0) {
    first = 1e-3 * grid.omega_max;
    from_zero = true;
  }
  grid.edges = integrate::geometric_edges(first, grid.omega_max, spec.shells);
  if (from_zero) grid.edges.front() = 0.0;
  return grid;
}

}  // namespace

double shell_sum_rule_oracle(const model::ModelConfig& config, const DiscretizationSpec& spec) {
  const ShellGrid grid = shell_grid(config, spec);
  if (grid.edges.empty()) return 0.0;
  const double mass = config.dispersion.mass;
  const double lo = std::max({grid.edges.front(), config.sigma, mass});
  if (lo >= grid.omega_max) return 0.0;
  return spectral_integral(config.rho2, config.n, config.n, k_of_omega(lo, mass),
                           k_of_omega(grid.omega_max, mass),
                           [&](double k) { return 0.5 / config.dispersion.omega(k); });
}

ModeSet discretize_modes(const model::ModelConfig& config, const model::ParticleBasis& basis,
                         const DiscretizationSpec& spec) {
  config.validate();
  if (config.d != 1) throw PreconditionError("the quantum solver supports d = 1 only");
  if (basis.size() == 0) throw PreconditionError("empty particle basis");
  if (spec.max_label < 0) throw PreconditionError("max_label must be non-negative");
  const double extent = basis.support_extent(spec.support_tol);
  if (!(spec.box > config.rho1.radius() + extent)) {
    std::ostringstream msg;
    msg << "box too small: L = " << spec.box << " must exceed R_1 + particle extent = "
        << config.rho1.radius() + extent;
    throw PreconditionError(msg.str());
  }

  ModeSet out;
  out.box = spec.box;
  out.sigma = config.sigma;
  out.mass = config.dispersion.mass;
  out.particle_dim = basis.size();

  const double mass = config.dispersion.mass;
  const ShellGrid grid = shell_grid(config, spec);
  for (std::size_t i = 0; i + 1 < grid.edges.size(); ++i) {
    Shell shell;
    shell.omega_lo = std::max({grid.edges[i], config.sigma, mass});
    shell.omega_hi = grid.edges[i + 1];
    if (shell.omega_lo >= shell.omega_hi) continue;  // below the infrared cutoff
    shell.k_lo = k_of_omega(shell.omega_lo, mass);
    shell.k_hi = k_of_omega(shell.omega_hi, mass);
    const double w2 = spectral_integral(config.rho2, config.n, config.n, shell.k_lo, shell.k_hi,
                                        [&](double k) { return 0.5 / config.dispersion.omega(k); });
    const double first_moment = spectral_integral(config.rho2, config.n, config.n, shell.k_lo,
                                                  shell.k_hi, [](double) { return 0.5; });
    if (!(w2 > 0.0)) continue;
    shell.weight = std::sqrt(w2);
    shell.omega = std::clamp(first_moment / w2, shell.omega_lo, shell.omega_hi);
    out.shells.push_back(shell);
  }

  // Beta_p(Q) sampled on the particle grid where the basis has support.
  const auto points = basis.grid_points();
  std::vector<bool> active(points, false);
  for (std::size_t i = 0; i < points; ++i) {
    for (Eigen::Index a = 0; a < basis.vectors().cols(); ++a) {
      const double peak = basis.vectors().col(a).cwiseAbs().maxCoeff();
      if (std::abs(basis.vectors()(static_cast<Eigen::Index>(i), a)) > 1e-14 * peak) {
        active[i] = true;
        break;
      }
    }
  }
  std::vector<int> labels{0};
  for (int p = 1; p <= spec.max_label; ++p) {
    labels.push_back(p);
    labels.push_back(-p);
  }
  for (int label : labels) {
    Eigen::VectorXd weights = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(points));
    for (std::size_t i = 0; i < points; ++i) {
      if (!active[i]) continue;
      weights(static_cast<Eigen::Index>(i)) =
          basis.spacing() * beta_coefficient(config.rho1, spec.box, label, basis.x(i));
    }
    SpatialMode sm;
    sm.label = label;
    sm.wavenumber = kPi * std::abs(label) / spec.box;
    sm.coupling = basis.vectors().transpose() * weights.asDiagonal() * basis.vectors();
    sm.coupling = 0.5 * (sm.coupling + sm.coupling.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sm.coupling, Eigen::EigenvaluesOnly);
    sm.coupling_norm = es.eigenvalues().cwiseAbs().maxCoeff();
    out.spatial.push_back(std::move(sm));
  }

  for (std::size_t s = 0; s < out.spatial.size(); ++s) {
    for (std::size_t j = 0; j < out.shells.size(); ++j) {
      Mode mode;
      mode.spatial = s;
      mode.shell = j;
      mode.omega = out.shells[j].omega;
      mode.coupling = out.shells[j].weight * out.spatial[s].coupling;
      out.modes.push_back(std::move(mode));
    }
  }
  return out;
}

std::vector<double> coupling_norms_by_label(const ModeSet& modes) {
  int max_label = 0;
  for (const auto& s : modes.spatial) max_label = std::max(max_label, std::abs(s.label));
  std::vector<double> out(static_cast<std::size_t>(max_label) + 1, 0.0);
  for (const auto& s : modes.spatial) {
    auto& slot = out[static_cast<std::size_t>(std::abs(s.label))];
    slot = std::max(slot, s.coupling_norm);
  }
  return out;
}

DecayFit tail_decay_power(std::span<const double> per_label, int p_from) {
  std::vector<double> x, y;
  const int last = static_cast<int>(per_label.size()) - 1;
  for (int p = std::max(1, p_from); p <= last; ++p) {
    double envelope = 0.0;
    for (int q = p; q <= last; ++q) envelope = std::max(envelope, per_label[static_cast<std::size_t>(q)]);
    if (!(envelope > 0.0)) break;
    x.push_back(std::log(static_cast<double>(p)));
    y.push_back(std::log(envelope));
  }
  if (x.size() < 2) throw PreconditionError("decay fit needs at least two labels with support");
  const fit::LinearFit lf = fit::linear(x, y);
  return {-lf.slope, lf.r2};
}

void write_csv(std::ostream& out, const IrReport& report) {
  out << "sigma,integral,model\n";
  out.precision(17);
  for (std::size_t i = 0; i < report.sigma_values.size(); ++i) {
    out << report.sigma_values[i] << ',' << report.integral_values[i] << ','
        << report.model_value(report.sigma_values[i]) << '\n';
  }
}

void write_csv(std::ostream& out, const ModeSet& modes) {
  out << "mode,label,wavenumber,shell,omega_lo,omega_hi,omega,g,coupling_norm\n";
  out.precision(17);
  for (std::size_t j = 0; j < modes.modes.size(); ++j) {
    const Mode& m = modes.modes[j];
    const Shell& sh = modes.shells[m.shell];
    const bool has_spatial = m.spatial < modes.spatial.size() && !modes.spatial.empty();
    out << j << ',' << (has_spatial ? modes.spatial[m.spatial].label : 0) << ','
        << (has_spatial ? modes.spatial[m.spatial].wavenumber : 0.0) << ',' << m.shell << ','
        << sh.omega_lo << ',' << sh.omega_hi << ',' << m.omega << ',' << sh.weight << ','
        << (has_spatial ? modes.spatial[m.spatial].coupling_norm : std::abs(sh.weight)) << '\n';
  }
}

}  // namespace frictionlab::quad
