#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "core/model.hpp"

namespace frictionlab::quad {

// ---------------------------------------------------------------------------
// Friction coefficient
//
//   gamma = (pi / c^3) |hat rho_2(0)|^2  int_{R^n} dxi int_{R^{d-1}} deta |hat rho_1(|xi|, eta)|^2
//
// hat rho_1 is the d-dimensional transform, radial, so the double integral is
// a radial integral over R^{n+d-1}.
struct GammaReport {
  double gamma = 0.0;
  double rho2_hat_zero = 0.0;     // hat rho_2(0), n-dimensional
  double momentum_integral = 0.0; // the (xi, eta) integral
  double prefactor = 0.0;         // pi / c^3
};

GammaReport friction_coefficient(const model::ModelConfig& config);

// ---------------------------------------------------------------------------
// Infrared integrals

// |hat rho| below this counts as zero at k = 0 (zero-mean profiles).
double fourier_zero_tolerance(const model::RadialProfile& profile, int nu);

// int_{omega(k) >= sigma} |hat rho_2(k)|^2 / omega(k)^3 dk over R^n.
// Throws DivergenceError for sigma = 0, n = 3, massless, hat rho_2(0) != 0.
double ir_integral(const model::RadialProfile& rho2, int n, double sigma,
                   const model::DispersionSpec& dispersion = {});

// Same integrand restricted to sigma_lo <= omega(k) < sigma_hi.
double ir_band(const model::RadialProfile& rho2, int n, double sigma_lo, double sigma_hi,
               const model::DispersionSpec& dispersion = {});

enum class IrClass { convergent, log_divergent, power_divergent };
std::string_view to_string(IrClass c);

struct IrReport {
  std::vector<double> sigma_values;
  std::vector<double> integral_values;
  IrClass classification = IrClass::convergent;
  // Winning model: convergent  I = a + b sigma^exponent
  //                log         I = a + b ln(1/sigma)
  //                power       I = a + b sigma^-exponent
  double a = 0.0;
  double b = 0.0;
  double exponent = 0.0;
  double fit_r2 = 0.0;
  double r2_convergent = 0.0;
  double r2_log = 0.0;
  double r2_power = 0.0;

  double model_value(double sigma) const;
};

inline constexpr double kClassifyMinR2 = 0.99;
inline constexpr double kClassifyMargin = 0.005;

// Classifies a sampled I(sigma) curve. Requires the grid to span >= 2 decades.
// Throws AmbiguousFitError when no model reaches r2 > 0.99 with a 0.005 margin.
IrReport classify_series(std::span<const double> sigmas, std::span<const double> values);

IrReport classify_ir(const model::RadialProfile& rho2, int n, std::span<const double> sigmas,
                     const model::DispersionSpec& dispersion = {});

// ---------------------------------------------------------------------------
// Dressed (shifted-equilibrium) infrared integrals
//
// membrane: int dx int dk |rho_1(x - q) - rho_1(x)|^2 |hat rho_2(k)|^2 / omega^3
// nelson:   int_{R^d} dk |hat rho(k)|^2 |exp(-i k q) - 1|^2 / omega^3, with rho = rho_2
//           read as a d-dimensional charge.
enum class DressedModel { membrane, nelson };
std::string_view to_string(DressedModel m);

// int_{R^d} |rho_1(x - q) - rho_1(x)|^2 dx for a displacement of length |q|.
double displacement_norm(const model::RadialProfile& rho1, int d, double q);

double dressed_ir(DressedModel kind, const model::ModelConfig& config, double q, double sigma);

IrReport classify_dressed(DressedModel kind, const model::ModelConfig& config, double q,
                          std::span<const double> sigmas);

// ---------------------------------------------------------------------------
// Soft-boson bound  ||rho_1||_2^2 * int_{omega >= sigma} |hat rho_2|^2 / (2 omega^3).
double soft_boson_bound(const model::ModelConfig& config, double sigma);

// ---------------------------------------------------------------------------
// Mode discretization
//
// The box [-L, L] is expanded in the real orthonormal Fourier basis
//   e_0 = (2L)^{-1/2},  e_p = L^{-1/2} cos(pi p x / L) (p > 0),
//   e_p = L^{-1/2} sin(pi |p| x / L) (p < 0),
// which is a unitary recombination of the exp(i pi p x / L) modes. The
// k-continuum is collapsed to one effective mode per frequency shell.
struct Shell {
  double omega_lo = 0.0;  // frequency window actually integrated
  double omega_hi = 0.0;
  double k_lo = 0.0;
  double k_hi = 0.0;
  double omega = 0.0;   // |hat rho_2|^2 / (2 omega)-weighted mean frequency
  double weight = 0.0;  // g_j, with g_j^2 = shell integral of |hat rho_2|^2 / (2 omega)
};

struct SpatialMode {
  int label = 0;
  double wavenumber = 0.0;   // pi |label| / L
  Eigen::MatrixXd coupling;  // <phi_a| beta_p(Q) |phi_b>
  double coupling_norm = 0.0;
};

struct Mode {
  std::size_t spatial = 0;
  std::size_t shell = 0;
  double omega = 0.0;
  Eigen::MatrixXd coupling;  // B_j: coefficient of a*_j in the interaction
};

struct ModeSet {
  std::vector<SpatialMode> spatial;
  std::vector<Shell> shells;
  std::vector<Mode> modes;
  double box = 0.0;
  double sigma = 0.0;
  double mass = 0.0;
  std::size_t particle_dim = 1;

  std::size_t size() const { return modes.size(); }
  bool empty() const { return modes.empty(); }

  // Modes with particle-independent coupling B_j = g_j * Identity.
  static ModeSet scalar(std::span<const double> omegas, std::span<const double> couplings,
                        std::size_t particle_dim);

  // Keeps couplings of spatial modes with |label| <= max_label, zeroes the rest.
  ModeSet restricted_support(int max_label) const;
  // Multiplies every coupling by `factor`.
  ModeSet scaled(double factor) const;
};

struct DiscretizationSpec {
  double box = 12.0;         // L
  int max_label = 2;         // P_max
  std::size_t shells = 4;    // J
  double k_max = 0.0;        // 0 selects a tail-based default
  double omega_min = 0.0;    // lower edge of the geometric shell grid; 0 -> max(m, sigma)
  double support_tol = 1e-6; // basis extent criterion for the box check
};

// Smooth cutoff j_L(x) = j(x / L): 1 for |x| <= L/2, 0 for |x| >= 3L/4.
double box_cutoff(double x, double box);

// Fourier coefficient of rho_1(x - Q) j_L(x) against e_label.
double beta_coefficient(const model::RadialProfile& rho1, double box, int label, double q);

// Default k_max: the |hat rho_2|^2 k^{n-2} tail beyond it is < 1e-8 relative.
double default_k_max(const model::RadialProfile& rho2, int n);

ModeSet discretize_modes(const model::ModelConfig& config, const model::ParticleBasis& basis,
                         const DiscretizationSpec& spec);

// int |hat rho_2(k)|^2 / (2 omega(k)) dk over max(m, sigma, omega_min) <= omega <= omega(k_max),
// computed as one integral independent of the shell partition.
double shell_sum_rule_oracle(const model::ModelConfig& config, const DiscretizationSpec& spec);

// Per |label| (0..P_max): largest operator norm over the cos/sin pair.
std::vector<double> coupling_norms_by_label(const ModeSet& modes);

// Log-log slope fit of the tail profile T(P) = sum_{|p| > P} values[|p|] for
// P = p_from..(labels - 2); returns the decay power (negated slope) and r2.
struct DecayFit {
  double power = 0.0;
  double r2 = 0.0;
};
DecayFit tail_decay_power(std::span<const double> per_label, int p_from = 1);

void write_csv(std::ostream& out, const IrReport& report);
void write_csv(std::ostream& out, const ModeSet& modes);

}  // namespace frictionlab::quad
