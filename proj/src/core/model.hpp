#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <string_view>

namespace frictionlab::model {

enum class ProfileShape { smooth_bump, polynomial_bump };

std::string_view to_string(ProfileShape shape);
ProfileShape profile_shape_from_string(std::string_view name);

// Smooth radial coupling function with compact support in a ball of radius R.
//
// smooth_bump:     A * exp(1 - R^2 / (R^2 - r^2))   (C-infinity)
// polynomial_bump: A * (1 - r^2 / R^2)^3            (C^2)
//
// With zero_mean set, the profile is b_R(r) - 2^dim * b_{R/2}(r), whose volume
// integral over R^dim vanishes. `dimension` is the space the profile lives in
// and only matters for that construction.
class RadialProfile {
 public:
  RadialProfile() = default;
  RadialProfile(ProfileShape shape, double radius, double amplitude, bool zero_mean = false,
                int dimension = 3);

  double operator()(double r) const;
  double derivative(double r) const;

  ProfileShape shape() const { return m_shape; }
  double radius() const { return m_radius; }
  double amplitude() const { return m_amplitude; }
  bool zero_mean() const { return m_zero_mean; }
  int dimension() const { return m_dimension; }

  RadialProfile scaled(double factor) const;
  RadialProfile with_dimension(int dimension) const;

 private:
  double base(double r, double radius) const;
  double base_derivative(double r, double radius) const;

  ProfileShape m_shape = ProfileShape::smooth_bump;
  double m_radius = 1.0;
  double m_amplitude = 1.0;
  bool m_zero_mean = false;
  int m_dimension = 3;
};

// Area of the unit sphere S^{nu-1} in R^nu.
double sphere_area(int nu);

// Angular average of exp(i k.y) over |y| = r in R^nu, as a function of x = k r.
// Equals Gamma(nu/2) (2/x)^{nu/2-1} J_{nu/2-1}(x); 1 at x = 0.
double spherical_kernel(int nu, double x);
// 1 - spherical_kernel(nu, x), accurate for small x.
double kernel_complement(int nu, double x);

// Unitary transform  hat_rho(k) = (2 pi)^{-nu/2} int_{R^nu} exp(-i k.y) rho(|y|) dy.
// nu in 1..5. For nu in {2, 4, 5} and k R > 200 the value is taken as 0.
// Evaluated from a cached piecewise-Chebyshev table of the unit-profile
// transform; radial_fourier_direct integrates from scratch.
double radial_fourier(const RadialProfile& profile, int nu, double k);
double radial_fourier_direct(const RadialProfile& profile, int nu, double k);

// int_{R^nu} rho(|y|)^p dy, p in {1, 2}.
double volume_integral(const RadialProfile& profile, int nu, int power = 1);

struct DispersionSpec {
  double mass = 0.0;
  double omega(double k) const;
};

class Potential {
 public:
  enum class Kind { harmonic, quartic, linear };

  static Potential harmonic(double spring, std::array<double, 3> center = {0, 0, 0});
  static Potential quartic(double quadratic, double quartic);
  static Potential linear(std::array<double, 3> force);

  Kind kind() const { return m_kind; }
  bool confining() const;
  double value(std::span<const double> q) const;
  void gradient(std::span<const double> q, std::span<double> out) const;

  double spring() const { return m_spring; }
  double quadratic() const { return m_quadratic; }
  double quartic_coefficient() const { return m_quartic; }
  const std::array<double, 3>& force() const { return m_force; }
  const std::array<double, 3>& center() const { return m_center; }

 private:
  Kind m_kind = Kind::harmonic;
  double m_spring = 1.0;
  double m_quadratic = 0.0;
  double m_quartic = 0.0;
  std::array<double, 3> m_force{};
  std::array<double, 3> m_center{};
};

std::string_view to_string(Potential::Kind kind);

struct ModelConfig {
  int d = 1;
  int n = 3;
  double c = 10.0;
  RadialProfile rho1{ProfileShape::smooth_bump, 1.0, 1.0, false, 1};
  RadialProfile rho2{ProfileShape::smooth_bump, 1.0, 1.0, false, 3};
  DispersionSpec dispersion;
  double sigma = 0.0;
  Potential potential = Potential::harmonic(1.0);

  // Throws ConfigError on violated invariants.
  void validate() const;
};

struct GridSpec {
  double half_width = 10.0;
  double spacing = 0.05;
};

// Low-lying eigenbasis of H_p = -d^2/dq^2 + V on a uniform grid in 1D.
// Eigenvectors are normalized with the grid weight: sum_i h phi_a(q_i) phi_b(q_i) = delta_ab.
class ParticleBasis {
 public:
  ParticleBasis() = default;
  ParticleBasis(double x_min, double spacing, Eigen::VectorXd energies, Eigen::MatrixXd vectors);

  std::size_t size() const { return static_cast<std::size_t>(m_energies.size()); }
  std::size_t grid_points() const { return static_cast<std::size_t>(m_vectors.rows()); }
  double x(std::size_t i) const { return m_x_min + m_spacing * static_cast<double>(i); }
  double x_min() const { return m_x_min; }
  double spacing() const { return m_spacing; }

  const Eigen::VectorXd& energies() const { return m_energies; }
  const Eigen::MatrixXd& vectors() const { return m_vectors; }
  double ground_energy() const { return m_energies(0); }

  // Matrix of the multiplication operator f(Q) in this basis (grid quadrature).
  template <typename F>
  Eigen::MatrixXd multiplication_matrix(F&& f) const {
    Eigen::VectorXd weights(m_vectors.rows());
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      weights(i) = m_spacing * f(x(static_cast<std::size_t>(i)));
    }
    return m_vectors.transpose() * weights.asDiagonal() * m_vectors;
  }

  // Smallest X such that every basis vector satisfies |phi_a(q)| < tol * max|phi_a| for |q| > X.
  double support_extent(double tol = 1e-6) const;

 private:
  double m_x_min = 0.0;
  double m_spacing = 1.0;
  Eigen::VectorXd m_energies;
  Eigen::MatrixXd m_vectors;
};

// Fourth-order finite-difference diagonalization of -d^2/dq^2 + V on [-W, W]
// with Dirichlet ends. Throws PreconditionError for non-confining potentials
// or when an eigenvector has not decayed to boundary_tol at the grid edge.
ParticleBasis build_particle_basis(const Potential& potential, const GridSpec& grid,
                                   std::size_t count, double boundary_tol = 1e-8);

}  // namespace frictionlab::model
