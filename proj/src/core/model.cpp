#include "core/model.hpp"

#include <array>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>
#include <numbers>
#include <sstream>

#include "core/error.hpp"
#include "core/integrate.hpp"
#include "core/log.hpp"

namespace frictionlab::model {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxBesselArgument = 200.0;
constexpr double kMaxTabulated = 400.0;

}  // namespace

std::string_view to_string(ProfileShape shape) {
  switch (shape) {
    case ProfileShape::smooth_bump:
      return "smooth_bump";
    case ProfileShape::polynomial_bump:
      return "polynomial_bump";
  }
  return "unknown";
}

ProfileShape profile_shape_from_string(std::string_view name) {
  if (name == "smooth_bump") return ProfileShape::smooth_bump;
  if (name == "polynomial_bump") return ProfileShape::polynomial_bump;
  throw ConfigError("unknown profile shape '" + std::string(name) + "'");
}

RadialProfile::RadialProfile(ProfileShape shape, double radius, double amplitude, bool zero_mean,
                             int dimension)
    : m_shape(shape),
      m_radius(radius),
      m_amplitude(amplitude),
      m_zero_mean(zero_mean),
      m_dimension(dimension) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("profile support radius must be positive");
  }
  if (!std::isfinite(amplitude)) throw ConfigError("profile amplitude must be finite");
  if (dimension < 1 || dimension > 5) throw ConfigError("profile dimension must be in 1..5");
}

double RadialProfile::base(double r, double radius) const {
  if (r >= radius) return 0.0;
  const double x2 = (r * r) / (radius * radius);
  switch (m_shape) {
    case ProfileShape::smooth_bump:
      return std::exp(1.0 - 1.0 / (1.0 - x2));
    case ProfileShape::polynomial_bump: {
      const double s = 1.0 - x2;
      return s * s * s;
    }
  }
  return 0.0;
}

double RadialProfile::base_derivative(double r, double radius) const {
  if (r >= radius) return 0.0;
  const double x2 = (r * r) / (radius * radius);
  const double s = 1.0 - x2;
  switch (m_shape) {
    case ProfileShape::smooth_bump:
      return std::exp(1.0 - 1.0 / s) * (-2.0 * r / (radius * radius)) / (s * s);
    case ProfileShape::polynomial_bump:
      return 3.0 * s * s * (-2.0 * r / (radius * radius));
  }
  return 0.0;
}

double RadialProfile::operator()(double r) const {
  r = std::abs(r);
  double value = base(r, m_radius);
  if (m_zero_mean) value -= std::ldexp(base(r, 0.5 * m_radius), m_dimension);
  return m_amplitude * value;
}

double RadialProfile::derivative(double r) const {
  const double sign = r < 0.0 ? -1.0 : 1.0;
  r = std::abs(r);
  double value = base_derivative(r, m_radius);
  if (m_zero_mean) value -= std::ldexp(base_derivative(r, 0.5 * m_radius), m_dimension);
  return sign * m_amplitude * value;
}

RadialProfile RadialProfile::scaled(double factor) const {
  RadialProfile out = *this;
  out.m_amplitude *= factor;
  return out;
}

RadialProfile RadialProfile::with_dimension(int dimension) const {
  return RadialProfile(m_shape, m_radius, m_amplitude, m_zero_mean, dimension);
}

double sphere_area(int nu) {
  return 2.0 * std::pow(kPi, 0.5 * nu) / std::tgamma(0.5 * nu);
}

double spherical_kernel(int nu, double x) {
  x = std::abs(x);
  switch (nu) {
    case 1:
      return std::cos(x);
    case 2:
      return boost::math::cyl_bessel_j(0, x);
    case 3:
      if (x < 1e-4) return 1.0 - x * x / 6.0;
      return std::sin(x) / x;
    case 4:
      if (x < 1e-4) return 1.0 - x * x / 8.0;
      return 2.0 * boost::math::cyl_bessel_j(1, x) / x;
    case 5: {
      if (x < 0.1) {
        const double x2 = x * x;
        return 1.0 - x2 / 10.0 + x2 * x2 / 280.0 - x2 * x2 * x2 / 15120.0;
      }
      return 3.0 * (std::sin(x) - x * std::cos(x)) / (x * x * x);
    }
    default:
      throw PreconditionError("unsupported dimension " + std::to_string(nu) +
                              " for the radial Fourier transform");
  }
}

double kernel_complement(int nu, double x) {
  x = std::abs(x);
  if (x >= 2.0) return 1.0 - spherical_kernel(nu, x);
  // 1 - Lambda = -sum_{m>=1} Gamma(nu/2) (-x^2/4)^m / (m! Gamma(m + nu/2)).
  const double y = -0.25 * x * x;
  double term = 1.0, sum = 0.0;
  for (int m = 1; m < 40; ++m) {
    term *= y / (m * (m - 1 + 0.5 * nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return -sum;
}

double radial_fourier_direct(const RadialProfile& profile, int nu, double k) {
  if (nu < 1 || nu > 5) {
    throw PreconditionError("unsupported dimension " + std::to_string(nu) +
                            " for the radial Fourier transform");
  }
  if (k < 0.0) throw PreconditionError("radial wavenumber must be non-negative");
  const double radius = profile.radius();
  if ((nu == 2 || nu == 4 || nu == 5) && k * radius > kMaxBesselArgument) {
    log::warn_once("radial_fourier_cutoff",
                   "radial Fourier transform beyond k*R = 200 taken as 0 (nu = " +
                       std::to_string(nu) + ")");
    return 0.0;
  }
  const auto integrand = [&](double r) {
    return profile(r) * std::pow(r, nu - 1) * spherical_kernel(nu, k * r);
  };
  // Half-period panels for the oscillatory kernel, and at least 16 panels so
  // the (half-support) bump of a zero-mean profile is resolved.
  double width = radius / 16.0;
  if (k > 0.0) width = std::min(width, kPi / k);
  const auto edges = integrate::uniform_edges(0.0, radius, width);
  const double scale = std::abs(profile.amplitude()) * std::pow(radius, nu);
  const integrate::Tolerance tol{1e-15 * std::max(scale, 1e-300), 1e-12, 18};
  const double integral = integrate::panels(integrand, edges, tol);
  return std::pow(2.0 * kPi, -0.5 * nu) * sphere_area(nu) * integral;
}

namespace {

// Piecewise Chebyshev table of the transform of a unit profile (R = 1, A = 1).
// hat rho_{A,R}(k) = A R^nu hat rho_{1,1}(k R), so one table per shape serves
// every amplitude and radius.
class FourierTable {
 public:
  static constexpr int kNodes = 12;
  static constexpr double kWidth = kPi / 4.0;

  FourierTable(const RadialProfile& unit, int nu, double k_max) {
    const auto panels = static_cast<std::size_t>(std::floor(k_max / kWidth));
    m_k_max = kWidth * static_cast<double>(panels);
    m_coefficients.resize(panels * kNodes);
    std::array<double, kNodes> values{};
    double shared = radial_fourier_direct(unit, nu, 0.0);
    for (std::size_t p = 0; p < panels; ++p) {
      const double a = kWidth * static_cast<double>(p);
      // Chebyshev-Lobatto nodes, x_j = cos(pi j / (N-1)); x = -1 is the left edge.
      for (int j = 0; j < kNodes; ++j) {
        const double x = std::cos(kPi * j / (kNodes - 1));
        if (j == kNodes - 1) {
          values[j] = shared;
        } else {
          values[j] = radial_fourier_direct(unit, nu, a + 0.5 * kWidth * (x + 1.0));
        }
      }
      shared = values[0];
      double* c = &m_coefficients[p * kNodes];
      for (int m = 0; m < kNodes; ++m) {
        double sum = 0.0;
        for (int j = 0; j < kNodes; ++j) {
          const double w = (j == 0 || j == kNodes - 1) ? 0.5 : 1.0;
          sum += w * values[j] * std::cos(kPi * m * j / (kNodes - 1));
        }
        c[m] = sum * 2.0 / (kNodes - 1);
      }
      c[0] *= 0.5;
      c[kNodes - 1] *= 0.5;
    }
  }

  double k_max() const { return m_k_max; }

  // Small-x series  sum_m (-1)^m (x/2)^{2m} Gamma(nu/2) / (m! Gamma(nu/2 + m)) M_{2m}.
  // Used for zero-mean profiles only, whose transform vanishes like x^2 and
  // is lost to cancellation in the direct integral.
  void set_moments(const RadialProfile& unit, int nu) {
    const double pre = std::pow(2.0 * kPi, -0.5 * nu) * sphere_area(nu);
    double ratio = 1.0;  // Gamma(nu/2) / (m! Gamma(nu/2 + m))
    for (int m = 0; m < kMoments; ++m) {
      if (m > 0) ratio /= m * (0.5 * nu + m - 1);
      const auto integrand = [&](double r) { return unit(r) * std::pow(r, nu - 1 + 2 * m); };
      const auto edges = integrate::uniform_edges(0.0, 1.0, 1.0 / 16.0);
      m_series[m] = pre * ratio * integrate::panels(integrand, edges, {1e-18, 1e-13, 18});
    }
    m_series[0] = 0.0;  // zero mean by construction; the quadrature leaves ~1e-17
    m_has_series = true;
  }
  bool use_series(double x) const { return m_has_series && x < kSeriesLimit; }
  double series(double x) const {
    const double u = 0.25 * x * x;
    double sum = 0.0, power = 1.0;
    for (int m = 0; m < kMoments; ++m) {
      sum += (m % 2 ? -1.0 : 1.0) * power * m_series[m];
      power *= u;
    }
    return sum;
  }

  double operator()(double k) const {
    const auto p = std::min(static_cast<std::size_t>(k / kWidth),
                            m_coefficients.size() / kNodes - 1);
    const double a = kWidth * static_cast<double>(p);
    const double x = 2.0 * (k - a) / kWidth - 1.0;
    const double* c = &m_coefficients[p * kNodes];
    double b1 = 0.0, b2 = 0.0;
    for (int m = kNodes - 1; m >= 1; --m) {
      const double b0 = 2.0 * x * b1 - b2 + c[m];
      b2 = b1;
      b1 = b0;
    }
    return x * b1 - b2 + c[0];
  }

 private:
  static constexpr int kMoments = 5;
  static constexpr double kSeriesLimit = 0.05;

  double m_k_max;
  std::vector<double> m_coefficients;
  std::array<double, kMoments> m_series{};
  bool m_has_series = false;
};

const FourierTable& unit_table(const RadialProfile& profile, int nu) {
  using Key = std::tuple<int, bool, int, int>;
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<FourierTable>> cache;
  const Key key{static_cast<int>(profile.shape()), profile.zero_mean(),
                profile.zero_mean() ? profile.dimension() : 0, nu};
  std::lock_guard lock(mutex);
  auto& slot = cache[key];
  if (!slot) {
    const RadialProfile unit(profile.shape(), 1.0, 1.0, profile.zero_mean(), profile.dimension());
    const double k_max = (nu == 1 || nu == 3) ? kMaxTabulated : kMaxBesselArgument;
    slot = std::make_unique<FourierTable>(unit, nu, k_max);
    if (profile.zero_mean()) slot->set_moments(unit, nu);
  }
  return *slot;
}

}  // namespace

double radial_fourier(const RadialProfile& profile, int nu, double k) {
  if (nu < 1 || nu > 5) {
    throw PreconditionError("unsupported dimension " + std::to_string(nu) +
                            " for the radial Fourier transform");
  }
  if (k < 0.0) throw PreconditionError("radial wavenumber must be non-negative");
  const double radius = profile.radius();
  const double x = k * radius;
  if ((nu == 2 || nu == 4 || nu == 5) && x > kMaxBesselArgument) {
    log::warn_once("radial_fourier_cutoff",
                   "radial Fourier transform beyond k*R = 200 taken as 0 (nu = " +
                       std::to_string(nu) + ")");
    return 0.0;
  }
  const FourierTable& table = unit_table(profile, nu);
  if (x > table.k_max()) return radial_fourier_direct(profile, nu, k);
  const double unit = table.use_series(x) ? table.series(x) : table(x);
  return profile.amplitude() * std::pow(radius, nu) * unit;
}

double volume_integral(const RadialProfile& profile, int nu, int power) {
  const auto integrand = [&](double r) {
    const double v = profile(r);
    return (power == 2 ? v * v : v) * std::pow(r, nu - 1);
  };
  const auto edges = integrate::uniform_edges(0.0, profile.radius(), profile.radius() / 16.0);
  const integrate::Tolerance tol{1e-16, 1e-13, 18};
  return sphere_area(nu) * integrate::panels(integrand, edges, tol);
}

double DispersionSpec::omega(double k) const { return std::sqrt(k * k + mass * mass); }

Potential Potential::harmonic(double spring, std::array<double, 3> center) {
  Potential p;
  p.m_kind = Kind::harmonic;
  p.m_spring = spring;
  p.m_center = center;
  return p;
}

Potential Potential::quartic(double quadratic, double quartic) {
  Potential p;
  p.m_kind = Kind::quartic;
  p.m_quadratic = quadratic;
  p.m_quartic = quartic;
  return p;
}

Potential Potential::linear(std::array<double, 3> force) {
  Potential p;
  p.m_kind = Kind::linear;
  p.m_force = force;
  return p;
}

std::string_view to_string(Potential::Kind kind) {
  switch (kind) {
    case Potential::Kind::harmonic:
      return "harmonic";
    case Potential::Kind::quartic:
      return "quartic";
    case Potential::Kind::linear:
      return "linear";
  }
  return "unknown";
}

bool Potential::confining() const {
  switch (m_kind) {
    case Kind::harmonic:
      return m_spring > 0.0;
    case Kind::quartic:
      return m_quartic > 0.0 || (m_quartic == 0.0 && m_quadratic > 0.0);
    case Kind::linear:
      return false;
  }
  return false;
}

double Potential::value(std::span<const double> q) const {
  double r2 = 0.0;
  switch (m_kind) {
    case Kind::harmonic:
      for (std::size_t i = 0; i < q.size(); ++i) r2 += (q[i] - m_center[i]) * (q[i] - m_center[i]);
      return 0.5 * m_spring * r2;
    case Kind::quartic:
      for (double qi : q) r2 += qi * qi;
      return m_quadratic * r2 + m_quartic * r2 * r2;
    case Kind::linear: {
      double v = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) v -= m_force[i] * q[i];
      return v;
    }
  }
  return 0.0;
}

void Potential::gradient(std::span<const double> q, std::span<double> out) const {
  double r2 = 0.0;
  switch (m_kind) {
    case Kind::harmonic:
      for (std::size_t i = 0; i < q.size(); ++i) out[i] = m_spring * (q[i] - m_center[i]);
      return;
    case Kind::quartic:
      for (double qi : q) r2 += qi * qi;
      for (std::size_t i = 0; i < q.size(); ++i) {
        out[i] = (2.0 * m_quadratic + 4.0 * m_quartic * r2) * q[i];
      }
      return;
    case Kind::linear:
      for (std::size_t i = 0; i < q.size(); ++i) out[i] = -m_force[i];
      return;
  }
}

void ModelConfig::validate() const {
  if (d < 1 || d > 3) throw ConfigError("particle dimension d must be in 1..3");
  if (n < 3 || n > 5) throw ConfigError("membrane dimension n must be in 3..5");
  if (!(c > 0.0)) throw ConfigError("wave speed c must be positive");
  if (sigma < 0.0) throw ConfigError("infrared cutoff sigma must be non-negative");
  if (dispersion.mass < 0.0) throw ConfigError("boson mass must be non-negative");
}

ParticleBasis::ParticleBasis(double x_min, double spacing, Eigen::VectorXd energies,
                             Eigen::MatrixXd vectors)
    : m_x_min(x_min),
      m_spacing(spacing),
      m_energies(std::move(energies)),
      m_vectors(std::move(vectors)) {
  if (m_vectors.cols() != m_energies.size()) {
    throw PreconditionError("particle basis: energy and vector counts differ");
  }
}

double ParticleBasis::support_extent(double tol) const {
  double extent = 0.0;
  for (Eigen::Index a = 0; a < m_vectors.cols(); ++a) {
    const double peak = m_vectors.col(a).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < m_vectors.rows(); ++i) {
      if (std::abs(m_vectors(i, a)) >= tol * peak) {
        extent = std::max(extent, std::abs(x(static_cast<std::size_t>(i))));
      }
    }
  }
  return extent;
}

ParticleBasis build_particle_basis(const Potential& potential, const GridSpec& grid,
                                   std::size_t count, double boundary_tol) {
  if (!potential.confining()) {
    throw PreconditionError("particle basis requires a confining potential");
  }
  if (!(grid.spacing > 0.0) || !(grid.half_width > 0.0)) {
    throw PreconditionError("particle grid needs positive spacing and extent");
  }
  const auto points =
      static_cast<Eigen::Index>(std::llround(2.0 * grid.half_width / grid.spacing)) + 1;
  if (points < static_cast<Eigen::Index>(count) + 5) {
    throw PreconditionError("particle grid too coarse for the requested basis size");
  }
  const double h = 2.0 * grid.half_width / static_cast<double>(points - 1);
  const double x_min = -grid.half_width;

  // -psi'' ~ (psi_{i-2} - 16 psi_{i-1} + 30 psi_i - 16 psi_{i+1} + psi_{i+2}) / (12 h^2)
  const double inv = 1.0 / (12.0 * h * h);
  Eigen::MatrixXd hamiltonian = Eigen::MatrixXd::Zero(points, points);
  for (Eigen::Index i = 0; i < points; ++i) {
    const double q = x_min + h * static_cast<double>(i);
    hamiltonian(i, i) = 30.0 * inv + potential.value(std::span<const double>(&q, 1));
    if (i + 1 < points) hamiltonian(i, i + 1) = hamiltonian(i + 1, i) = -16.0 * inv;
    if (i + 2 < points) hamiltonian(i, i + 2) = hamiltonian(i + 2, i) = inv;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  if (solver.info() != Eigen::Success) throw NumericalError("particle diagonalization failed");

  const auto n = static_cast<Eigen::Index>(count);
  Eigen::VectorXd energies = solver.eigenvalues().head(n);
  Eigen::MatrixXd vectors = solver.eigenvectors().leftCols(n) / std::sqrt(h);
  for (Eigen::Index a = 0; a < n; ++a) {
    // Fix the sign so the first significant lobe (from the left) is positive.
    Eigen::Index first = 0;
    const double peak = vectors.col(a).cwiseAbs().maxCoeff();
    while (first < points && std::abs(vectors(first, a)) < 1e-3 * peak) ++first;
    if (first < points && vectors(first, a) < 0.0) vectors.col(a) *= -1.0;

    const double edge = std::max(std::abs(vectors(0, a)), std::abs(vectors(points - 1, a)));
    if (edge > boundary_tol * peak) {
      std::ostringstream msg;
      msg << "particle grid too small: eigenvector " << a << " has relative amplitude "
          << edge / peak << " at the boundary";
      throw PreconditionError(msg.str());
    }
  }
  return ParticleBasis(x_min, h, std::move(energies), std::move(vectors));
}

}  // namespace frictionlab::model
