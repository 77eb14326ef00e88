#include "core/classical.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "core/error.hpp"
#include "core/fit.hpp"

namespace frictionlab::classical {

namespace {

constexpr std::size_t kMaxFieldValues = 400'000'000;

}  // namespace

double MembraneScheme::field_value(std::size_t j, double node_value) const {
  return n == 3 ? node_value / radius[j] : node_value;
}

MembraneScheme make_scheme(const model::RadialProfile& rho2, int n, double c, double h,
                           double r_max) {
  if (!(h > 0.0) || !(r_max > h)) throw PreconditionError("radial grid needs 0 < h_r < r_max");
  MembraneScheme s;
  s.n = n;
  s.c = c;
  s.h = h;
  const auto cells = static_cast<std::size_t>(std::ceil(r_max / h));
  s.radius.resize(cells);
  s.mass.resize(cells);
  s.stiffness.resize(cells);
  s.source.resize(cells);
  const double area = model::sphere_area(n);
  for (std::size_t j = 0; j < cells; ++j) {
    const auto jd = static_cast<double>(j);
    if (n == 3) {
      // u = r phi on nodes r_j = (j + 1) h, u(0) = 0 pinned.
      s.radius[j] = (jd + 1.0) * h;
      s.mass[j] = area * h;
      s.stiffness[j] = area * c * c / h;
      s.source[j] = area * h * rho2(s.radius[j]) * s.radius[j];
    } else {
      // Finite volumes [j h, (j + 1) h]; no flux through r = 0.
      s.radius[j] = (jd + 0.5) * h;
      s.mass[j] = area / n * std::pow(h, n) * (std::pow(jd + 1.0, n) - std::pow(jd, n));
      s.stiffness[j] = j == 0 ? 0.0 : area * std::pow(jd * h, n - 1) * c * c / h;
      s.source[j] = s.mass[j] * rho2(s.radius[j]);
    }
    if (s.source[j] != 0.0) s.source_cells = j + 1;
  }
  s.inv_mass.resize(cells);
  for (std::size_t j = 0; j < cells; ++j) s.inv_mass[j] = 1.0 / s.mass[j];

  // Gershgorin bound on the largest frequency of W^{-1/2} K W^{-1/2}.
  double omega2 = 0.0;
  for (std::size_t j = 0; j < cells; ++j) {
    const double left = s.stiffness[j];
    const double right = j + 1 < cells ? s.stiffness[j + 1] : 0.0;
    double row = (left + right) * s.inv_mass[j];
    if (j > 0) row += left / std::sqrt(s.mass[j] * s.mass[j - 1]);
    if (j + 1 < cells) row += right / std::sqrt(s.mass[j] * s.mass[j + 1]);
    omega2 = std::max(omega2, row);
  }
  s.max_stable_dt = 2.0 / std::sqrt(omega2);
  return s;
}

namespace {

struct SiteRange {
  std::array<std::size_t, 3> lo{}, hi{};  // inclusive
};

SiteRange support_range(const Geometry& g, const std::array<double, 3>& q) {
  const double r1 = g.config.rho1.radius();
  SiteRange range;
  for (int a = 0; a < g.d; ++a) {
    const double lo = std::ceil((q[a] - r1 - g.grid.x_lo) / g.grid.h_x);
    const double hi = std::floor((q[a] + r1 - g.grid.x_lo) / g.grid.h_x);
    if (lo < 0.0 || hi > static_cast<double>(g.per_axis - 1)) {
      std::ostringstream msg;
      msg << "particle left the membrane lattice (q = " << q[a] << ", lattice ["
          << g.grid.x_lo << ", " << g.grid.x_hi << "])";
      throw NumericalError(msg.str());
    }
    range.lo[a] = static_cast<std::size_t>(lo);
    range.hi[a] = static_cast<std::size_t>(hi);
  }
  return range;
}

// Calls f(site, displacement x_i - q) for every site in the support of rho_1(. - q).
template <typename F>
void for_each_support_site(const Geometry& g, const std::array<double, 3>& q, F&& f) {
  const SiteRange r = support_range(g, q);
  const std::size_t n = g.per_axis;
  std::array<double, 3> dx{};
  for (std::size_t k = (g.d > 2 ? r.lo[2] : 0); k <= (g.d > 2 ? r.hi[2] : 0); ++k) {
    if (g.d > 2) dx[2] = g.x(k) - q[2];
    for (std::size_t j = (g.d > 1 ? r.lo[1] : 0); j <= (g.d > 1 ? r.hi[1] : 0); ++j) {
      if (g.d > 1) dx[1] = g.x(j) - q[1];
      for (std::size_t i = r.lo[0]; i <= r.hi[0]; ++i) {
        dx[0] = g.x(i) - q[0];
        f(i + n * (j + n * k), dx);
      }
    }
  }
}

double norm(const std::array<double, 3>& v, int d) {
  double s = 0.0;
  for (int a = 0; a < d; ++a) s += v[a] * v[a];
  return std::sqrt(s);
}

void touch(ClassicalState& state, std::size_t site) {
  if (!state.phi[site].empty()) return;
  const auto& scheme = state.geometry->scheme;
  state.phi[site].assign(scheme.radius.size(), 0.0);
  state.pi[site].assign(scheme.radius.size(), 0.0);
  state.front[site] = scheme.source_cells > 0 ? scheme.source_cells - 1 : 0;
  ++state.touched_sites;
}

double coupled_field(const MembraneScheme& s, const std::vector<double>& phi) {
  double sum = 0.0;
  for (std::size_t j = 0; j < s.source_cells; ++j) sum += s.source[j] * phi[j];
  return sum;
}

// Half of a kick: momentum updates of every touched membrane and of the particle.
void kick(ClassicalState& state, double tau) {
  const Geometry& g = *state.geometry;
  const MembraneScheme& s = g.scheme;
  const std::size_t cells = s.radius.size();
  const int d = g.d;

  // Source strengths at the current particle position.
  std::array<double, 3> force{};
  std::vector<std::pair<std::size_t, double>> sources;
  for_each_support_site(g, state.q, [&](std::size_t site, const std::array<double, 3>& dx) {
    const double r = norm(dx, d);
    // Membranes carry the lattice weight h_x^d in both their energy and the
    // coupling, so it cancels from the field equation.
    const double value = g.config.rho1(r);
    if (value == 0.0) return;
    touch(state, site);
    sources.emplace_back(site, value);
    if (r > 0.0) {
      const double drho = g.site_weight * g.config.rho1.derivative(r) / r;
      const double phi_b = coupled_field(s, state.phi[site]);
      for (int a = 0; a < d; ++a) force[a] += drho * dx[a] * phi_b;
    }
  });

  std::size_t next_source = 0;
  std::sort(sources.begin(), sources.end());
  for (std::size_t site = 0; site < state.phi.size(); ++site) {
    auto& phi = state.phi[site];
    if (phi.empty()) continue;
    auto& pi = state.pi[site];
    double strength = 0.0;
    if (next_source < sources.size() && sources[next_source].first == site) {
      strength = sources[next_source].second;
      ++next_source;
    }
    const std::size_t last = std::min(cells - 1, state.front[site] + 1);
    double prev = 0.0;  // phi_{-1}
    for (std::size_t j = 0; j <= last; ++j) {
      const double here = phi[j];
      const double next = j + 1 < cells ? phi[j + 1] : 0.0;
      const double right = j + 1 < cells ? s.stiffness[j + 1] : 0.0;
      const double elastic = s.stiffness[j] * (here - prev) - right * (next - here);
      pi[j] -= tau * (elastic + strength * s.source[j]);
      prev = here;
    }
    if (last > state.front[site] && pi[last] != 0.0) state.front[site] = last;
  }

  if (!g.grid.freeze_particle) {
    std::array<double, 3> grad{};
    g.config.potential.gradient(std::span<const double>(state.q.data(), d),
                                std::span<double>(grad.data(), d));
    for (int a = 0; a < d; ++a) state.p[a] += tau * (force[a] - grad[a]);
  }
}

void drift(ClassicalState& state, double dt) {
  const Geometry& g = *state.geometry;
  const MembraneScheme& s = g.scheme;
  for (std::size_t site = 0; site < state.phi.size(); ++site) {
    auto& phi = state.phi[site];
    if (phi.empty()) continue;
    const auto& pi = state.pi[site];
    const std::size_t last = state.front[site];
    for (std::size_t j = 0; j <= last; ++j) phi[j] += dt * pi[j] * s.inv_mass[j];
  }
  if (!g.grid.freeze_particle) {
    for (int a = 0; a < g.d; ++a) state.q[a] += dt * state.p[a];
  }
}

}  // namespace

ClassicalState init_state(const model::ModelConfig& config, std::span<const double> q0,
                          std::span<const double> p0, const GridParams& grid,
                          double planned_duration) {
  config.validate();
  const int d = config.d;
  if (static_cast<int>(q0.size()) < d || static_cast<int>(p0.size()) < d) {
    throw PreconditionError("initial position / momentum need d components");
  }
  const double r1 = config.rho1.radius();
  const double r2 = config.rho2.radius();
  if (!(grid.h_x > 0.0) || grid.h_x > r1 / 8.0 * (1.0 + 1e-12)) {
    throw PreconditionError("lattice spacing h_x must be in (0, R_1 / 8]");
  }
  if (!(grid.h_r > 0.0) || grid.h_r > r2 / 8.0 * (1.0 + 1e-12)) {
    throw PreconditionError("radial spacing h_r must be in (0, R_2 / 8]");
  }
  if (grid.absorbing && config.n != 3) {
    throw PreconditionError("the absorbing boundary is available for n = 3 only");
  }
  for (int a = 0; a < d; ++a) {
    if (q0[a] - r1 < grid.x_lo || q0[a] + r1 > grid.x_hi) {
      std::ostringstream msg;
      msg << "lattice [" << grid.x_lo << ", " << grid.x_hi
          << "] does not cover the coupling support around q0 = " << q0[a];
      throw PreconditionError(msg.str());
    }
  }
  const double needed = config.c * planned_duration + r2;
  double r_max = grid.r_max > 0.0 ? grid.r_max : needed + 8.0 * grid.h_r;
  if (!grid.absorbing && r_max < needed) {
    std::ostringstream msg;
    msg << "radial extent r_max = " << r_max << " is below c T + R_2 = " << needed
        << " (waves would reflect); enlarge r_max or enable the absorbing boundary";
    throw PreconditionError(msg.str());
  }

  auto geometry = std::make_shared<Geometry>();
  geometry->config = config;
  geometry->grid = grid;
  geometry->grid.r_max = r_max;
  geometry->d = d;
  geometry->scheme = make_scheme(config.rho2, config.n, config.c, grid.h_r, r_max);
  geometry->per_axis =
      static_cast<std::size_t>(std::floor((grid.x_hi - grid.x_lo) / grid.h_x + 1e-9)) + 1;
  geometry->site_weight = std::pow(grid.h_x, d);
  std::size_t sites = 1;
  for (int a = 0; a < d; ++a) sites *= geometry->per_axis;

  ClassicalState state;
  state.geometry = geometry;
  state.phi.resize(sites);
  state.pi.resize(sites);
  state.front.assign(sites, 0);
  for (int a = 0; a < d; ++a) {
    state.q[a] = q0[a];
    state.p[a] = p0[a];
  }
  // Field memory is allocated lazily per touched site; bound the worst case.
  const double r1_sites = std::pow(2.0 * r1 / grid.h_x + 1.0, d);
  if (r1_sites * static_cast<double>(geometry->scheme.radius.size()) * 2.0 >
      static_cast<double>(kMaxFieldValues)) {
    throw PreconditionError("membrane lattice too large for memory; coarsen h_x / h_r or shrink r_max");
  }
  return state;
}

void step(ClassicalState& state, double dt) {
  const Geometry& g = *state.geometry;
  const MembraneScheme& s = g.scheme;
  if (!(dt > 0.0)) throw PreconditionError("time step must be positive");
  if (dt * g.config.c >= s.h || dt >= s.max_stable_dt) {
    std::ostringstream msg;
    msg << "CFL violation: dt = " << dt << " must be below min(h_r / c, " << s.max_stable_dt
        << ") = " << std::min(s.h / g.config.c, s.max_stable_dt);
    throw PreconditionError(msg.str());
  }
  const std::size_t cells = s.radius.size();
  std::vector<std::pair<double, double>> boundary;  // (u_{N-1}, u_{N-2}) before the step
  if (g.grid.absorbing) {
    boundary.resize(state.phi.size());
    for (std::size_t site = 0; site < state.phi.size(); ++site) {
      if (!state.phi[site].empty()) {
        boundary[site] = {state.phi[site][cells - 1], state.phi[site][cells - 2]};
      }
    }
  }
  kick(state, 0.5 * dt);
  drift(state, dt);
  kick(state, 0.5 * dt);
  if (g.grid.absorbing) {
    // Upwind discretization of u_t + c u_r = 0 at the outer node.
    const double courant = g.config.c * dt / s.h;
    for (std::size_t site = 0; site < state.phi.size(); ++site) {
      if (state.phi[site].empty() || state.front[site] < cells - 1) continue;
      const auto [old_last, old_prev] = boundary[site];
      const double updated = old_last - courant * (old_last - old_prev);
      state.phi[site][cells - 1] = updated;
      state.pi[site][cells - 1] = s.mass[cells - 1] * (updated - old_last) / dt;
    }
  }
  ++state.steps;
  state.t = static_cast<double>(state.steps) * dt;
}

std::array<double, 3> interaction_force(const ClassicalState& state) {
  const Geometry& g = *state.geometry;
  std::array<double, 3> force{};
  for_each_support_site(g, state.q, [&](std::size_t site, const std::array<double, 3>& dx) {
    if (state.phi[site].empty()) return;
    const double r = norm(dx, g.d);
    if (r == 0.0) return;
    const double drho = g.site_weight * g.config.rho1.derivative(r) / r;
    const double phi_b = coupled_field(g.scheme, state.phi[site]);
    for (int a = 0; a < g.d; ++a) force[a] += drho * dx[a] * phi_b;
  });
  return force;
}

Energies total_energy(const ClassicalState& state) {
  const Geometry& g = *state.geometry;
  const MembraneScheme& s = g.scheme;
  Energies e;
  double p2 = 0.0;
  for (int a = 0; a < g.d; ++a) p2 += state.p[a] * state.p[a];
  e.particle = 0.5 * p2 + g.config.potential.value(std::span<const double>(state.q.data(), g.d));
  for (std::size_t site = 0; site < state.phi.size(); ++site) {
    const auto& phi = state.phi[site];
    if (phi.empty()) continue;
    const auto& pi = state.pi[site];
    double prev = 0.0;
    for (std::size_t j = 0; j <= state.front[site]; ++j) {
      const double bond = phi[j] - prev;
      e.field += 0.5 * pi[j] * pi[j] * s.inv_mass[j] + 0.5 * s.stiffness[j] * bond * bond;
      prev = phi[j];
    }
    if (state.front[site] + 1 < phi.size()) {
      // Bond to the first zero cell.
      e.field += 0.5 * s.stiffness[state.front[site] + 1] * prev * prev;
    }
  }
  e.field *= g.site_weight;
  for_each_support_site(g, state.q, [&](std::size_t site, const std::array<double, 3>& dx) {
    if (state.phi[site].empty()) return;
    e.interaction += g.site_weight * g.config.rho1(norm(dx, g.d)) * coupled_field(s, state.phi[site]);
  });
  e.total = e.particle + e.field + e.interaction;
  return e;
}

std::vector<double> TimeSeries::q_component(int axis) const {
  std::vector<double> out;
  out.reserve(q.size());
  for (const auto& v : q) out.push_back(v[axis]);
  return out;
}

std::vector<double> TimeSeries::p_component(int axis) const {
  std::vector<double> out;
  out.reserve(p.size());
  for (const auto& v : p) out.push_back(v[axis]);
  return out;
}

namespace {

void sample(TimeSeries& series, const ClassicalState& state) {
  const Energies e = total_energy(state);
  const auto f = interaction_force(state);
  bool finite = std::isfinite(e.total);
  for (int a = 0; a < series.d; ++a) {
    finite = finite && std::isfinite(state.q[a]) && std::isfinite(state.p[a]);
  }
  if (!finite) {
    std::ostringstream msg;
    msg << "non-finite state at t = " << state.t << " (step " << state.steps << ")";
    throw NumericalError(msg.str());
  }
  series.t.push_back(state.t);
  series.q.push_back(state.q);
  series.p.push_back(state.p);
  series.force.push_back(f);
  series.e_particle.push_back(e.particle);
  series.e_field.push_back(e.field);
  series.e_interaction.push_back(e.interaction);
  series.e_total.push_back(e.total);
}

}  // namespace

TimeSeries run(const model::ModelConfig& config, const RunParams& params) {
  if (params.duration < 0.0) throw PreconditionError("duration must be non-negative");
  if (params.stride == 0) throw PreconditionError("sample stride must be positive");
  ClassicalState state = init_state(config, params.q0, params.p0, params.grid, params.duration);
  TimeSeries series;
  series.d = config.d;
  sample(series, state);
  const auto steps = static_cast<std::size_t>(std::llround(params.duration / params.dt));
  for (std::size_t k = 1; k <= steps; ++k) {
    step(state, params.dt);
    if (k % params.stride == 0 || k == steps) sample(series, state);
  }
  return series;
}

void write_csv(std::ostream& out, const TimeSeries& series) {
  static constexpr const char* kAxis[] = {"q", "p", "F_int"};
  const auto names = [&](const char* base) {
    std::string s;
    for (int a = 0; a < series.d; ++a) {
      s += ',';
      s += base;
      if (series.d > 1) s += std::to_string(a + 1);
    }
    return s;
  };
  out << "t" << names(kAxis[0]) << names(kAxis[1]) << ",E_particle,E_field,E_int,E_total"
      << names(kAxis[2]) << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << series.t[i];
    for (int a = 0; a < series.d; ++a) out << ',' << series.q[i][a];
    for (int a = 0; a < series.d; ++a) out << ',' << series.p[i][a];
    out << ',' << series.e_particle[i] << ',' << series.e_field[i] << ','
        << series.e_interaction[i] << ',' << series.e_total[i];
    for (int a = 0; a < series.d; ++a) out << ',' << series.force[i][a];
    out << '\n';
  }
}

FitResult fit_dynamics(const TimeSeries& series, FitKind kind, double t_start, double t_end,
                       double fit_from, double center, int axis) {
  FitResult out;
  out.kind = kind;
  out.t_start = t_start;
  out.t_end = t_end;
  if (series.size() == 0 || t_start < series.t.front() - 1e-12 ||
      t_end > series.t.back() + 1e-12 || !(t_end > t_start)) {
    throw PreconditionError("fit window must lie inside the series");
  }
  std::vector<double> t, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (series.t[i] < t_start || series.t[i] > t_end) continue;
    t.push_back(series.t[i]);
    y.push_back(kind == FitKind::decay_rate ? series.q[i][axis] : series.p[i][axis]);
  }
  switch (kind) {
    case FitKind::asymptotic_velocity: {
      if (t.size() < 2) throw PreconditionError("fit window holds fewer than two samples");
      double mean = 0.0;
      for (double v : y) mean += v;
      out.value = mean / static_cast<double>(y.size());
      std::vector<double> ft, fy;
      for (std::size_t i = 0; i < series.size(); ++i) {
        if (series.t[i] < fit_from || series.t[i] > t_end) continue;
        ft.push_back(series.t[i]);
        fy.push_back(series.p[i][axis]);
      }
      const fit::ExponentialApproach e = fit::exponential_approach(ft, fy);
      out.rate = e.rate;
      out.asymptote = e.asymptote;
      out.r2 = e.r2;
      break;
    }
    case FitKind::decay_rate: {
      const fit::EnvelopeDecay e = fit::envelope_decay(t, y, center);
      out.value = e.rate;
      out.r2 = e.r2;
      break;
    }
    case FitKind::power_exponent:
      throw PreconditionError("power exponents are fitted across runs, see fit_power_exponent");
  }
  out.low_confidence = !(out.r2 >= kLowConfidenceR2);
  return out;
}

FitResult fit_power_exponent(std::span<const double> forces, std::span<const double> velocities) {
  if (forces.size() != velocities.size() || forces.size() < 2) {
    throw PreconditionError("power fit needs >= 2 (force, velocity) pairs");
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < forces.size(); ++i) {
    if (!(forces[i] > 0.0) || !(velocities[i] > 0.0)) {
      throw PreconditionError("power fit needs positive forces and velocities");
    }
    x.push_back(std::log(forces[i]));
    y.push_back(std::log(velocities[i]));
  }
  const fit::LinearFit lf = fit::linear(x, y);
  FitResult out;
  out.kind = FitKind::power_exponent;
  out.value = lf.slope;
  out.r2 = lf.r2;
  out.t_start = forces.front();
  out.t_end = forces.back();
  out.low_confidence = !(out.r2 >= kLowConfidenceR2);
  return out;
}

TimeSeries effective_trajectory(const model::Potential& potential, double gamma, int n,
                                double q0, double p0, double duration, double dt,
                                std::size_t stride) {
  if (!(dt > 0.0) || stride == 0) throw PreconditionError("bad time step or stride");
  const auto accel = [&](double q, double p) {
    double grad = 0.0;
    potential.gradient(std::span<const double>(&q, 1), std::span<double>(&grad, 1));
    return -grad - gamma * std::pow(std::abs(p), n - 3) * p;
  };
  TimeSeries s;
  s.d = 1;
  const auto push = [&](double t, double q, double p) {
    s.t.push_back(t);
    s.q.push_back({q, 0, 0});
    s.p.push_back({p, 0, 0});
    s.force.push_back({-gamma * std::pow(std::abs(p), n - 3) * p, 0, 0});
    const double e = 0.5 * p * p + potential.value(std::span<const double>(&q, 1));
    s.e_particle.push_back(e);
    s.e_field.push_back(0.0);
    s.e_interaction.push_back(0.0);
    s.e_total.push_back(e);
  };
  double q = q0, p = p0;
  push(0.0, q, p);
  const auto steps = static_cast<std::size_t>(std::llround(duration / dt));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double k1q = p, k1p = accel(q, p);
    const double k2q = p + 0.5 * dt * k1p, k2p = accel(q + 0.5 * dt * k1q, p + 0.5 * dt * k1p);
    const double k3q = p + 0.5 * dt * k2p, k3p = accel(q + 0.5 * dt * k2q, p + 0.5 * dt * k2p);
    const double k4q = p + dt * k3p, k4p = accel(q + dt * k3q, p + dt * k3p);
    q += dt / 6.0 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
    if (k % stride == 0 || k == steps) push(static_cast<double>(k) * dt, q, p);
  }
  return s;
}

}  // namespace frictionlab::classical
