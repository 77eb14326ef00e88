// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: frictionlab_acceptance [criterion ...]   (default: all of 1..12)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/classical.hpp"
#include "core/experiments.hpp"
#include "core/fock.hpp"
#include "core/log.hpp"
#include "core/quadrature.hpp"

using namespace frictionlab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

// Criterion 3 looks at every quantum problem solved by the other criteria.
struct VariationalLedger {
  double worst = -1e300;
  std::size_t solved = 0;
  void record(double e0, double e_p0) {
    worst = std::max(worst, e0 - e_p0);
    ++solved;
  }
  void record(const experiments::SweepResult& r, double e_p0) {
    for (const auto& row : r.rows) record(row.e0, e_p0);
  }
} ledger;

experiments::SolveSummary solve(const experiments::QuantumProblem& p) {
  auto s = experiments::solve_problem(p, {});
  ledger.record(s.e0, s.e_p0);
  return s;
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Weakly coupled d = 1 model with the particle-independent parts fixed.
experiments::QuantumSetup weak_setup(int n, double amplitude) {
  experiments::QuantumSetup s;
  s.config.n = n;
  s.config.rho2 = s.config.rho2.with_dimension(n);
  s.config.rho1 = s.config.rho1.scaled(amplitude);
  s.modes.box = 12.0;
  return s;
}

// rho_2 amplitude giving the requested gamma (gamma is quadratic in it).
model::ModelConfig tuned_config(int n, double gamma) {
  model::ModelConfig cfg;
  cfg.n = n;
  cfg.rho2 = cfg.rho2.with_dimension(n);
  const double g1 = quad::friction_coefficient(cfg).gamma;
  cfg.rho2 = cfg.rho2.scaled(std::sqrt(gamma / g1));
  return cfg;
}

classical::RunParams run_params(double duration, double q0) {
  classical::RunParams rp;
  rp.duration = duration;
  rp.dt = 0.8 * rp.grid.h_r / 10.0;
  rp.stride = 10;
  rp.q0[0] = q0;
  return rp;
}

// ---------------------------------------------------------------------------

Verdict vanhove() {
  const auto t0 = std::chrono::steady_clock::now();
  experiments::VanHoveSpec spec;
  for (unsigned n_max = 4;; n_max += 2) {
    spec.n_max = n_max;
    const auto p = experiments::vanhove_problem(spec);
    const auto s = solve(p);
    if (s.top_weight >= 1e-10 && n_max < 16) continue;
    double e_ref = p.e_p0, occ_err = 0.0;
    for (std::size_t j = 0; j < spec.omegas.size(); ++j) {
      const double g = spec.couplings[j], w = spec.omegas[j];
      e_ref -= g * g / w;
      occ_err = std::max(occ_err, std::abs(s.occupations[j] - (g / w) * (g / w)));
    }
    const double de = std::abs(s.e0 - e_ref), secs = elapsed(t0);
    return {s.top_weight < 1e-10 && de < 1e-8 && occ_err < 1e-8 && secs < 10.0,
            "N_max=" + std::to_string(n_max) + " top weight " + fmt(s.top_weight) + ", |dE| " +
                fmt(de) + ", occupation error " + fmt(occ_err) + ", " + fmt(secs) + " s"};
  }
}

Verdict ntau() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> omega(0.3, 3.0);
  constexpr std::size_t kModes = 5, kDim = 2;
  quad::ModeSet modes;
  modes.particle_dim = kDim;
  for (std::size_t j = 0; j < kModes; ++j) {
    quad::Mode m;
    m.omega = omega(rng);
    m.coupling = Eigen::MatrixXd::NullaryExpr(kDim, kDim, [&] { return gauss(rng); });
    modes.modes.push_back(m);
  }
  fock::FockBasis fb(kModes, 3);
  std::vector<Eigen::VectorXd> trials;
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd psi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fb.size() * kDim));
    // Raising one more boson must stay inside the truncated space.
    for (std::size_t f = 0; f < fb.size(); ++f) {
      if (fb.degree(f) >= fb.n_max()) continue;
      for (std::size_t a = 0; a < kDim; ++a) psi(static_cast<Eigen::Index>(f * kDim + a)) = gauss(rng);
    }
    trials.push_back(psi.normalized());
  }
  const auto rep = fock::check_ntau(fb, modes, trials, 1e-12);
  const double secs = elapsed(t0);
  return {rep.violations == 0 && secs < 10.0,
          std::to_string(rep.violations) + " violations in 1000 trials, worst margin " +
              fmt(rep.worst_margin) + ", " + fmt(secs) + " s"};
}

Verdict support() {
  auto setup = weak_setup(3, 0.3);
  setup.modes.max_label = 3;
  setup.modes.shells = 2;
  const auto r = experiments::sweep_support(setup, {0, 1, 2, 3});
  ledger.record(r, r.rows.front().extra.at("e_p0"));
  double worst_rise = -1e300;
  std::string energies;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (i) worst_rise = std::max(worst_rise, r.rows[i].e0 - r.rows[i - 1].e0);
    energies += (i ? " " : "") + fmt(r.rows[i].e0, 12);
  }
  return {r.rows.size() == 4 && worst_rise <= 1e-10,
          "E0(M=0..3) = " + energies + ", largest rise " + fmt(worst_rise)};
}

Verdict ir_dichotomy() {
  const auto t0 = std::chrono::steady_clock::now();
  model::ModelConfig cfg;
  std::vector<double> sigmas;
  for (int i = 0; i <= 12; ++i) sigmas.push_back(0.1 * std::pow(1e-3, i / 12.0));
  const auto rep = quad::classify_ir(cfg.rho2.with_dimension(3), 3, sigmas);
  bool ok = rep.classification == quad::IrClass::log_divergent && rep.r2_log > 0.999;
  std::string detail = "n=3 " + std::string(quad::to_string(rep.classification)) + " r2_log " +
                       fmt(rep.r2_log, 6);
  for (int n : {4, 5}) {
    const auto rho = cfg.rho2.with_dimension(n);
    const double a = quad::ir_integral(rho, n, 1e-4), b = quad::ir_integral(rho, n, 1e-6);
    const double rel = std::abs(a - b) / std::abs(b);
    ok = ok && rel < 1e-3;
    detail += "; n=" + std::to_string(n) + " relative change " + fmt(rel);
  }
  const double secs = elapsed(t0);
  return {ok && secs < 5.0, detail + ", " + fmt(secs) + " s"};
}

Verdict dressed() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> sigmas;
  for (int i = 0; i <= 8; ++i) sigmas.push_back(0.1 * std::pow(1e-3, i / 8.0));
  model::ModelConfig nelson;
  nelson.d = 3;
  nelson.rho1 = nelson.rho1.with_dimension(3);
  const auto a = quad::classify_dressed(quad::DressedModel::nelson, nelson, 1.0, sigmas);
  const auto b = quad::classify_dressed(quad::DressedModel::membrane, model::ModelConfig{}, 1.0, sigmas);
  const double secs = elapsed(t0);
  return {a.classification == quad::IrClass::convergent &&
              b.classification == quad::IrClass::log_divergent && secs < 10.0,
          "Nelson d=3 q=1 " + std::string(quad::to_string(a.classification)) + ", membrane n=3 q=1 " +
              std::string(quad::to_string(b.classification)) + ", " + fmt(secs) + " s"};
}

Verdict soft_bosons() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> sigmas;
  for (int i = 0; i < 6; ++i) sigmas.push_back(0.1 / std::pow(2.0, i));
  auto sweep = [&](int n) {
    auto s = weak_setup(n, 0.1);
    s.modes.max_label = 2;
    s.modes.shells = 16;
    s.modes.omega_min = 1e-3;
    s.n_max = 2;
    auto r = experiments::sweep_sigma(s, sigmas);
    ledger.record(r, r.rows.front().extra.at("e_p0"));
    return r;
  };
  const auto r3 = sweep(3);
  const auto r4 = sweep(4);
  const double decades = std::log10(sigmas.front() / sigmas.back());

  bool increasing = true, below = true, healthy = true;
  for (std::size_t i = 0; i < r3.rows.size(); ++i) {
    const auto& row = r3.rows[i];
    if (i && !(row.n_expect > r3.rows[i - 1].n_expect)) increasing = false;
    if (!(row.n_expect <= row.extra.at("bound"))) below = false;
    if (!(row.top_weight < experiments::kHealthyTopWeight)) healthy = false;
  }
  std::vector<double> x, y;
  for (const auto& row : r3.rows) {
    x.push_back(std::log(1.0 / row.param));
    y.push_back(row.n_expect);
  }
  // Independent least-squares fit of <N> against ln(1/sigma).
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);

  bool shrinking = true;
  double prev = 1e300;
  std::string inc;
  for (std::size_t i = 1; i < r4.rows.size(); ++i) {
    const double d = std::abs(r4.rows[i].n_expect - r4.rows[i - 1].n_expect);
    if (!(d < prev)) shrinking = false;
    prev = d;
    inc += (i > 1 ? " " : "") + fmt(d, 3);
    if (!(r4.rows[i].top_weight < experiments::kHealthyTopWeight)) healthy = false;
  }
  const double secs = elapsed(t0);
  const bool ok = decades >= 1.5 && increasing && below && r2 > 0.95 && shrinking && healthy && secs < 300.0;
  return {ok, "n=3 over " + fmt(decades) + " decades: increasing " + (increasing ? "yes" : "no") +
                  ", below bound " + (below ? "yes" : "no") + ", log fit r2 " + fmt(r2, 6) +
                  "; n=4 increments " + inc + "; " + fmt(secs) + " s"};
}

Verdict pullthrough() {
  experiments::VanHoveSpec spec;
  const auto vh = experiments::truncation_convergence(spec, {2, 4, 6, 8});
  ledger.record(vh, vh.rows.front().extra.at("e_p0"));
  auto residuals_decrease = [](const experiments::SweepResult& r) {
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
      if (!(r.rows[i].extra.at("pullthrough") < r.rows[i - 1].extra.at("pullthrough"))) return false;
    }
    return true;
  };
  const double g = *std::max_element(spec.couplings.begin(), spec.couplings.end());
  const double final_vh = vh.rows.back().extra.at("pullthrough");

  // Two modes with particle-dependent coupling: one spatial mode, two shells.
  auto s = weak_setup(3, 0.3);
  s.modes.max_label = 0;
  s.modes.shells = 2;
  const auto two = experiments::truncation_convergence(s, {1, 2, 3, 4, 5});
  ledger.record(two, two.rows.front().extra.at("e_p0"));

  std::string detail = "Van Hove:";
  for (const auto& row : vh.rows) detail += " " + fmt(row.extra.at("pullthrough"));
  detail += "; 2-mode model:";
  for (const auto& row : two.rows) detail += " " + fmt(row.extra.at("pullthrough"));
  return {residuals_decrease(vh) && residuals_decrease(two) && final_vh < 1e-6 * g, detail};
}

Verdict classical_integrity() {
  // Energy drift of the decoupled system over 1e4 steps.
  model::ModelConfig off;
  off.rho1 = off.rho1.scaled(0.0);
  classical::RunParams rp;
  rp.duration = 1.0;
  rp.dt = 1e-4;
  rp.stride = 100;
  rp.q0[0] = 1.0;
  rp.grid.r_max = 4.0;
  rp.grid.absorbing = true;
  const auto dec = classical::run(off, rp);
  double drift = 0.0;
  for (double e : dec.e_total) drift = std::max(drift, std::abs(e - dec.e_total.front()));
  drift /= std::abs(dec.e_total.front());

  // Self-convergence under dt halving on a strongly coupled run.
  const auto cfg = tuned_config(3, 0.5);
  auto go = [&](double dt, std::size_t stride, double r_max) {
    classical::RunParams p;
    p.duration = 2.0;
    p.dt = dt;
    p.stride = stride;
    p.q0[0] = 1.0;
    p.grid.x_lo = -3.0;
    p.grid.x_hi = 3.0;
    p.grid.r_max = r_max;
    return classical::run(cfg, p);
  };
  const auto a = go(4e-3, 8, 0.0), b = go(2e-3, 16, 0.0), c = go(1e-3, 32, 0.0);
  double e1 = 0, e2 = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e1 = std::max(e1, std::abs(a.q[i][0] - b.q[i][0]));
    e2 = std::max(e2, std::abs(b.q[i][0] - c.q[i][0]));
  }
  const double order = std::log2(e1 / e2);

  // R_max doubling: default is c T + R_2 plus a few cells.
  const double r_default = cfg.c * 2.0 + cfg.rho2.radius() + 4 * classical::GridParams{}.h_r;
  const auto big = go(4e-3, 8, 2.0 * r_default);
  double dr = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dr = std::max(dr, std::abs(a.q[i][0] - big.q[i][0]));

  const bool ok = drift < 1e-8 && std::abs(order - 2.0) <= 0.2 && dr < 1e-10 && a.size() == big.size();
  return {ok, "decoupled drift " + fmt(drift) + " over 1e4 steps; dt-halving order " + fmt(order, 4) +
                  "; R_max doubling max |dq| " + fmt(dr)};
}

Verdict linear_friction() {
  const auto cfg0 = tuned_config(3, 0.5);
  const double gamma = quad::friction_coefficient(cfg0).gamma;

  // Driven: constant force F.
  auto t0 = std::chrono::steady_clock::now();
  const double force = 0.05, duration = 20.0;
  auto driven = cfg0;
  driven.potential = model::Potential::linear({force, 0.0, 0.0});
  auto rp = run_params(duration, 0.0);
  rp.grid.x_hi = experiments::driven_lattice_extent(driven, force, duration, 0.0);
  const auto sd = classical::run(driven, rp);
  const auto fd = classical::fit_dynamics(sd, classical::FitKind::asymptotic_velocity, 0.5 * duration,
                                          duration, 0.5);
  const double v_ratio = fd.value / (force / gamma), rate_ratio = fd.rate / gamma;
  const double secs_driven = elapsed(t0);

  // Confining: harmonic well, released at rest from q0 = 1.
  t0 = std::chrono::steady_clock::now();
  const auto sh = classical::run(cfg0, run_params(25.0, 1.0));
  const auto fh = classical::fit_dynamics(sh, classical::FitKind::decay_rate, 0.0, 25.0, 0.0, 0.0);
  const double env_ratio = fh.value / (gamma / 2.0);
  const double secs_harmonic = elapsed(t0);

  const bool ok = std::abs(v_ratio - 1.0) <= 0.15 && std::abs(rate_ratio - 1.0) <= 0.25 &&
                  std::abs(env_ratio - 1.0) <= 0.25 && secs_driven < 600.0 && secs_harmonic < 600.0;
  return {ok, "gamma " + fmt(gamma, 4) + ": v_inf gamma/F " + fmt(v_ratio, 4) + ", rate/gamma " +
                  fmt(rate_ratio, 4) + "; harmonic envelope rate/(gamma/2) " + fmt(env_ratio, 4) +
                  " (" + fmt(secs_driven) + " s, " + fmt(secs_harmonic) + " s)"};
}

Verdict nonlinear_friction() {
  experiments::ForceSweepSpec spec;
  spec.config = tuned_config(4, 10.0);
  spec.run = run_params(20.0, 0.0);
  const std::vector<double> forces{0.05, 0.1, 0.2};
  const auto r = experiments::classical_force_sweep(spec, forces);
  // Own log-log slope of v_inf against F.
  std::vector<double> x, y;
  for (const auto& row : r.rows) {
    x.push_back(std::log(row.param));
    y.push_back(std::log(row.extra.at("v_inf")));
  }
  const double mx = (x[0] + x[1] + x[2]) / 3.0, my = (y[0] + y[1] + y[2]) / 3.0;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double exponent = sxy / sxx;
  std::string v;
  for (const auto& row : r.rows) v += " " + fmt(row.extra.at("v_inf"), 4);
  return {std::abs(exponent - 0.5) <= 0.1,
          "gamma " + fmt(r.summary.at("gamma"), 4) + ", v_inf:" + v + ", exponent " + fmt(exponent, 4)};
}

Verdict occupancy() {
  auto s = weak_setup(3, 0.1);
  s.modes.max_label = 24;
  s.modes.shells = 2;
  const auto p = experiments::build_problem(s);
  const auto r = experiments::occupancy_decay(p, {});
  ledger.record(r.solve.e0, r.solve.e_p0);
  return {r.occupation_fit.power >= 4.0 && r.occupation_fit.power >= r.coupling_fit.power &&
              r.solve.top_weight < experiments::kHealthyTopWeight,
          "occupation tail power " + fmt(r.occupation_fit.power, 4) + " (coupling-norm tail " +
              fmt(r.coupling_fit.power, 4) + "), P_max 24"};
}

Verdict variational() {
  return {ledger.solved > 0 && ledger.worst <= 1e-10,
          std::to_string(ledger.solved) + " solved configurations, max(E0 - E_p0) " + fmt(ledger.worst)};
}

}  // namespace

int main(int argc, char** argv) {
  log::set_level(log::Level::quiet);
  struct Entry {
    int id;
    const char* name;
    std::function<Verdict()> run;
  };
  // Criterion 3 is evaluated last, over everything solved before it.
  const std::vector<Entry> entries{
      {1, "Van Hove oracle", vanhove},
      {2, "N_tau inequality", ntau},
      {4, "monotone in coupling support", support},
      {5, "IR dichotomy by quadrature", ir_dichotomy},
      {6, "dressing comparison", dressed},
      {7, "soft-boson behaviour", soft_bosons},
      {8, "pullthrough identity", pullthrough},
      {9, "classical integrity", classical_integrity},
      {10, "emergent linear friction", linear_friction},
      {11, "nonlinear friction exponent", nonlinear_friction},
      {12, "occupancy decay in |p|", occupancy},
      {3, "variational bound", variational},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& e : entries) {
    if (!wanted.empty() && !wanted.count(e.id)) continue;
    Verdict v;
    try {
      v = e.run();
    } catch (const std::exception& ex) {
      v = {false, std::string("error: ") + ex.what()};
    }
    if (!v.pass) ++failures;
    std::printf("criterion %2d %-30s %s  %s\n", e.id, e.name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
