#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "core/model.hpp"

namespace frictionlab::classical {

// Lattice and membrane discretization.
struct GridParams {
  double h_x = 1.0 / 16.0;  // x-lattice spacing, at most R_1 / 8
  double h_r = 1.0 / 16.0;  // radial spacing, at most R_2 / 8
  double r_max = 0.0;       // 0 selects c * T + R_2 (+ a few cells)
  double x_lo = -2.0;       // lattice covers [x_lo, x_hi]^d
  double x_hi = 2.0;
  bool absorbing = false;   // outgoing-wave boundary at r_max (n = 3 only)
  bool freeze_particle = false;  // source held at q0 (field-only test mode)
};

// One membrane discretized as a chain of weighted nodes:
//   H_mem = sum_j pi_j^2 / (2 w_j) + 1/2 sum_j k_j (phi_j - phi_{j-1})^2 + s sum_j b_j phi_j
// with phi_{-1} = 0 (k_0 = 0 for the finite-volume form, which is the
// regularity condition at r = 0). For n = 3 the nodes carry u = r phi at
// r_j = (j + 1) h; for n >= 4 they are cells centred at (j + 1/2) h.
struct MembraneScheme {
  int n = 3;
  double c = 1.0;
  double h = 0.0;
  std::vector<double> radius;
  std::vector<double> mass;       // w_j
  std::vector<double> inv_mass;
  std::vector<double> stiffness;  // k_j, bond between j-1 and j
  std::vector<double> source;     // b_j
  std::size_t source_cells = 0;   // b_j = 0 for j >= source_cells
  double max_stable_dt = 0.0;     // Gershgorin stability limit of the chain

  // phi at node j (undoes the u = r phi substitution).
  double field_value(std::size_t j, double node_value) const;
};

MembraneScheme make_scheme(const model::RadialProfile& rho2, int n, double c, double h,
                           double r_max);

struct Geometry {
  model::ModelConfig config;
  GridParams grid;
  MembraneScheme scheme;
  int d = 1;
  std::size_t per_axis = 0;  // lattice sites per axis
  double site_weight = 0.0;  // h_x^d
  double x(std::size_t index) const { return grid.x_lo + grid.h_x * static_cast<double>(index); }
};

struct ClassicalState {
  std::shared_ptr<const Geometry> geometry;
  double t = 0.0;
  std::array<double, 3> q{};
  std::array<double, 3> p{};
  // Per touched site: interleaved storage is avoided, phi and pi are separate.
  std::vector<std::vector<double>> phi;
  std::vector<std::vector<double>> pi;
  std::vector<std::size_t> front;  // cells beyond front[i] are exactly zero
  std::size_t steps = 0;
  std::size_t touched_sites = 0;
};

// Fields at rest, particle at (q0, p0). planned_duration enters the
// no-reflection check R_max >= c T + R_2.
ClassicalState init_state(const model::ModelConfig& config, std::span<const double> q0,
                          std::span<const double> p0, const GridParams& grid,
                          double planned_duration);

// One kick-drift-kick Stormer-Verlet step. Throws PreconditionError on a CFL
// violation and NumericalError when the particle leaves the lattice.
void step(ClassicalState& state, double dt);

struct Energies {
  double particle = 0.0;
  double field = 0.0;
  double interaction = 0.0;
  double total = 0.0;
};

Energies total_energy(const ClassicalState& state);

// Field force on the particle, sum_i h_x^d grad rho_1(x_i - q) sum_j b_j phi_ij.
std::array<double, 3> interaction_force(const ClassicalState& state);

struct TimeSeries {
  int d = 1;
  std::vector<double> t;
  std::vector<std::array<double, 3>> q, p, force;
  std::vector<double> e_particle, e_field, e_interaction, e_total;

  std::size_t size() const { return t.size(); }
  std::vector<double> q_component(int axis = 0) const;
  std::vector<double> p_component(int axis = 0) const;
};

struct RunParams {
  double duration = 10.0;
  double dt = 1e-3;
  std::size_t stride = 10;
  std::array<double, 3> q0{};
  std::array<double, 3> p0{};
  GridParams grid;
};

// Deterministic; throws NumericalError on non-finite values.
TimeSeries run(const model::ModelConfig& config, const RunParams& params);

void write_csv(std::ostream& out, const TimeSeries& series);

// ---------------------------------------------------------------------------
// Fits

enum class FitKind { asymptotic_velocity, decay_rate, power_exponent };

struct FitResult {
  FitKind kind = FitKind::asymptotic_velocity;
  double value = 0.0;      // v_inf, envelope rate, or exponent
  double rate = 0.0;       // asymptotic_velocity: exponential approach rate
  double asymptote = 0.0;  // asymptotic_velocity: asymptote of the exponential fit
  double r2 = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;
  bool low_confidence = false;  // r2 < 0.9
};

inline constexpr double kLowConfidenceR2 = 0.9;

// asymptotic_velocity: value = mean p over [t_start, t_end]; rate from an
//   exponential-approach fit of p over [fit_from, t_end].
// decay_rate: log-envelope fit of |q - center| over the window.
FitResult fit_dynamics(const TimeSeries& series, FitKind kind, double t_start, double t_end,
                       double fit_from = 0.0, double center = 0.0, int axis = 0);

// Log-log slope of v_inf against F.
FitResult fit_power_exponent(std::span<const double> forces, std::span<const double> velocities);

// q'' = -grad V(q) - gamma |q'|^{n-3} q', integrated with RK4 (d = 1).
TimeSeries effective_trajectory(const model::Potential& potential, double gamma, int n,
                                double q0, double p0, double duration, double dt,
                                std::size_t stride);

}  // namespace frictionlab::classical
