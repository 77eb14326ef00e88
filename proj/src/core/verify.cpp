#include "core/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "core/classical.hpp"
#include "core/error.hpp"
#include "core/experiments.hpp"
#include "core/fock.hpp"
#include "core/quadrature.hpp"

namespace frictionlab::verify {

namespace {

using experiments::QuantumProblem;

struct Context {
  Fault fault = Fault::none;

  // Every Hamiltonian the suite solves goes through here.
  void tamper(QuantumProblem& problem) const {
    if (fault != Fault::coupling_sign) return;
    auto m = problem.hamiltonian.matrix();
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
      for (fock::SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
        if (it.col() > it.row()) it.valueRef() = -it.value();
      }
    }
    problem.hamiltonian = fock::SparseOperator(std::move(m), true);
  }
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Check {
  CheckInfo info;
  std::function<Outcome(const Context&)> run;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

// Small weakly coupled discretized model shared by several checks.
experiments::QuantumSetup small_setup() {
  experiments::QuantumSetup s;
  s.config.rho1 = s.config.rho1.scaled(0.3);
  s.particle_levels = 3;
  s.modes.box = 12.0;
  s.modes.max_label = 3;
  s.modes.shells = 2;
  s.n_max = 2;
  return s;
}

QuantumProblem small_problem(const Context& ctx, int max_label = 3, unsigned n_max = 2) {
  auto setup = small_setup();
  setup.modes.max_label = max_label;
  setup.n_max = n_max;
  auto p = experiments::build_problem(setup);
  ctx.tamper(p);
  return p;
}

quad::ModeSet random_modes(std::size_t count, std::size_t particle_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5), w(0.5, 2.0);
  quad::ModeSet set;
  set.particle_dim = particle_dim;
  const auto np = static_cast<Eigen::Index>(particle_dim);
  for (std::size_t j = 0; j < count; ++j) {
    quad::Mode m;
    m.omega = w(rng);
    Eigen::MatrixXd b(np, np);
    for (Eigen::Index r = 0; r < np; ++r) {
      for (Eigen::Index c = 0; c <= r; ++c) b(r, c) = b(c, r) = u(rng);
    }
    m.coupling = b;
    set.modes.push_back(std::move(m));
  }
  return set;
}

Outcome check_vanhove(const Context& ctx) {
  experiments::VanHoveSpec spec;
  auto p = experiments::vanhove_problem(spec);
  ctx.tamper(p);
  const auto ref = fock::vanhove_reference(p.modes, p.e_p0);
  const auto s = experiments::solve_problem(p, {});
  double occ_err = 0.0;
  for (std::size_t j = 0; j < ref.occupations.size(); ++j) {
    occ_err = std::max(occ_err, std::abs(s.occupations[j] - ref.occupations[j]));
  }
  const double de = std::abs(s.e0 - ref.energy);
  return {de < 1e-8 && occ_err < 1e-8 && s.top_weight < 1e-10,
          "dE=" + fmt(de) + " occupation error=" + fmt(occ_err) + " top weight=" + fmt(s.top_weight)};
}

Outcome check_hermiticity(const Context& ctx) {
  const auto p = small_problem(ctx);
  const double a = p.hamiltonian.asymmetry();
  return {a < 1e-12, "max |H - H^T| = " + fmt(a) + " on dimension " +
                         std::to_string(p.hamiltonian.dimension())};
}

Outcome check_ntau(const Context&) {
  const auto modes = random_modes(5, 2, 7);
  fock::FockBasis fb(5, 3);
  const auto trials = fock::random_trials(fb, 2, 1000, 11);
  const auto rep = fock::check_ntau(fb, modes, trials);
  return {rep.violations == 0,
          std::to_string(rep.violations) + " violations in 1000 trials, worst margin " +
              fmt(rep.worst_margin)};
}

Outcome check_variational(const Context& ctx) {
  std::vector<QuantumProblem> problems;
  problems.push_back(small_problem(ctx));
  auto vh = experiments::vanhove_problem({});
  ctx.tamper(vh);
  problems.push_back(std::move(vh));
  double worst = -1e300;
  for (const auto& p : problems) {
    const auto s = experiments::solve_problem(p, {});
    worst = std::max(worst, s.e0 - s.e_p0);
  }
  return {worst <= 1e-10, "max(E0 - E_p0) = " + fmt(worst)};
}

Outcome check_support(const Context& ctx) {
  auto setup = small_setup();
  const auto basis = model::build_particle_basis(setup.config.potential, setup.grid, setup.particle_levels);
  const auto full = quad::discretize_modes(setup.config, basis, setup.modes);
  double prev = 1e300, worst_rise = -1e300;
  std::string energies;
  for (int m = 0; m <= 3; ++m) {
    auto p = experiments::build_problem(basis, full.restricted_support(m), setup.n_max);
    ctx.tamper(p);
    const auto s = experiments::solve_problem(p, {});
    if (m > 0) worst_rise = std::max(worst_rise, s.e0 - prev);
    prev = s.e0;
    energies += (m ? " " : "") + fmt(s.e0);
  }
  return {worst_rise <= 1e-10, "E0(M=0..3): " + energies + ", worst rise " + fmt(worst_rise)};
}

Outcome check_truncation(const Context& ctx) {
  experiments::VanHoveSpec spec;
  const auto base = experiments::vanhove_problem(spec);
  const auto ref = fock::vanhove_reference(base.modes, base.e_p0);
  double prev_e = 1e300, prev_r = 1e300;
  bool monotone = true, decreasing = true;
  std::string detail;
  for (unsigned n : {2u, 4u, 6u, 8u}) {
    auto p = experiments::build_problem(base.basis, base.modes, n);
    ctx.tamper(p);
    fock::GroundState gs;
    const auto s = experiments::solve_problem(p, {}, &gs);
    const double r = fock::pullthrough_residual(gs, p.hamiltonian, *p.fock, p.modes, 0);
    if (s.e0 > prev_e + 1e-10) monotone = false;
    if (!(r < prev_r)) decreasing = false;
    prev_e = s.e0;
    prev_r = r;
    detail += "N=" + std::to_string(n) + ": dE=" + fmt(std::abs(s.e0 - ref.energy)) +
              " pullthrough=" + fmt(r) + "; ";
  }
  const bool small = prev_r < 1e-6 * spec.couplings[0];
  return {monotone && decreasing && small, detail};
}

Outcome check_occupancy(const Context& ctx) {
  auto setup = small_setup();
  setup.config.rho1 = model::ModelConfig{}.rho1.scaled(0.1);
  setup.modes.max_label = 24;
  auto p = experiments::build_problem(setup);
  ctx.tamper(p);
  const auto r = experiments::occupancy_decay(p, {});
  const bool ok = r.occupation_fit.power >= 4.0 &&
                  r.occupation_fit.power >= r.coupling_fit.power && r.solve.top_weight < 1e-6;
  return {ok, "occupation tail power " + fmt(r.occupation_fit.power) + ", coupling tail power " +
                  fmt(r.coupling_fit.power)};
}

Outcome check_ir(const Context&) {
  model::ModelConfig cfg;
  std::vector<double> sigmas;
  for (int i = 0; i <= 12; ++i) sigmas.push_back(0.1 * std::pow(1e-3, i / 12.0));
  const auto rep = quad::classify_ir(cfg.rho2.with_dimension(3), 3, sigmas);
  bool ok = rep.classification == quad::IrClass::log_divergent && rep.r2_log > 0.999;
  std::string detail = "n=3 " + std::string(quad::to_string(rep.classification)) +
                       " r2=" + fmt(rep.r2_log);
  for (int n : {4, 5}) {
    const auto rho = cfg.rho2.with_dimension(n);
    const double a = quad::ir_integral(rho, n, 1e-4), b = quad::ir_integral(rho, n, 1e-6);
    const double rel = std::abs(a - b) / std::abs(b);
    ok = ok && rel < 1e-3;
    detail += "; n=" + std::to_string(n) + " rel change " + fmt(rel);
  }
  return {ok, detail};
}

Outcome check_dressed(const Context&) {
  std::vector<double> sigmas;
  for (int i = 0; i <= 8; ++i) sigmas.push_back(0.1 * std::pow(1e-3, i / 8.0));
  model::ModelConfig nelson;
  nelson.d = 3;
  nelson.rho1 = nelson.rho1.with_dimension(3);
  const auto a = quad::classify_dressed(quad::DressedModel::nelson, nelson, 1.0, sigmas);
  model::ModelConfig membrane;
  const auto b = quad::classify_dressed(quad::DressedModel::membrane, membrane, 1.0, sigmas);
  return {a.classification == quad::IrClass::convergent &&
              b.classification == quad::IrClass::log_divergent,
          "nelson d=3: " + std::string(quad::to_string(a.classification)) +
              ", membrane n=3: " + std::string(quad::to_string(b.classification))};
}

Outcome check_gamma_scaling(const Context&) {
  model::ModelConfig cfg;
  const double g = quad::friction_coefficient(cfg).gamma;
  auto c1 = cfg;
  c1.rho1 = c1.rho1.scaled(2.0);
  auto c2 = cfg;
  c2.rho2 = c2.rho2.scaled(2.0);
  auto c3 = cfg;
  c3.c *= 2.0;
  const double e1 = std::abs(quad::friction_coefficient(c1).gamma / g - 4.0) / 4.0;
  const double e2 = std::abs(quad::friction_coefficient(c2).gamma / g - 4.0) / 4.0;
  const double e3 = std::abs(quad::friction_coefficient(c3).gamma / g - 0.125) / 0.125;
  const double worst = std::max({e1, e2, e3});
  return {g > 0.0 && worst < 1e-12, "gamma=" + fmt(g) + " worst scaling error " + fmt(worst)};
}

Outcome check_sum_rule(const Context&) {
  auto setup = small_setup();
  setup.modes.shells = 6;
  const auto basis = model::build_particle_basis(setup.config.potential, setup.grid, setup.particle_levels);
  const auto modes = quad::discretize_modes(setup.config, basis, setup.modes);
  double sum = 0.0;
  for (const auto& s : modes.shells) sum += s.weight * s.weight;
  const double oracle = quad::shell_sum_rule_oracle(setup.config, setup.modes);
  const double rel = std::abs(sum - oracle) / oracle;
  return {rel < 1e-6, "sum g^2 relative error " + fmt(rel)};
}

Outcome check_classical_decoupled(const Context&) {
  model::ModelConfig cfg;
  cfg.rho1 = cfg.rho1.scaled(0.0);
  classical::RunParams rp;
  // Verlet's bounded energy error is ~ (omega dt)^2 / 8, so 1e-8 needs dt ~ 1e-4.
  rp.duration = 1.0;
  rp.dt = 1e-4;
  rp.stride = 100;
  rp.q0 = {1.0, 0.0, 0.0};
  rp.grid.absorbing = true;
  rp.grid.r_max = 4.0;
  const auto series = classical::run(cfg, rp);
  double drift = 0.0;
  const double e0 = series.e_total.front();
  for (double e : series.e_total) drift = std::max(drift, std::abs(e - e0) / std::abs(e0));
  return {drift < 1e-8, "relative energy drift over 1e4 steps " + fmt(drift)};
}

const std::vector<Check>& checks() {
  static const std::vector<Check> all = {
      {{"vanhove", "Van Hove Hamiltonians: E0 = E_p0 - sum g^2/omega, <N_j> = (g/omega)^2"}, check_vanhove},
      {{"hermiticity", "H = H0 + H_I is self-adjoint"}, check_hermiticity},
      {{"ntau", "N_tau estimate: ||sum B a psi||^2 <= (sum |g|^2/omega) ||H_f^(1/2) psi||^2"}, check_ntau},
      {{"variational", "E_sigma <= E_p0 (trial state psi_p0 x vacuum)"}, check_variational},
      {{"support_monotone", "E0 of the discrete Hamiltonian is decreasing in the coupling support M"}, check_support},
      {{"truncation_pullthrough", "pullthrough formula a psi = -(H + omega - E0)^-1 B psi"}, check_truncation},
      {{"ir_dichotomy", "infrared condition: log divergent for n = 3, finite for n > 3"}, check_ir},
      {{"dressed_ir", "dressing: still divergent for n = 3 membranes, finite for Nelson even at d = 3"}, check_dressed},
      {{"gamma_scaling", "friction coefficient homogeneity in rho_1, rho_2 and c"}, check_gamma_scaling},
      {{"mode_sum_rule", "shell collapse preserves the |rho_2 hat|^2 / (2 omega) integral"}, check_sum_rule},
      {{"occupancy_decay", "far bosons: ground-state occupation per |p| decays faster than any power"}, check_occupancy},
      {{"classical_decoupled", "decoupled particle conserves energy under the symplectic step"}, check_classical_decoupled},
  };
  return all;
}

}  // namespace

Fault fault_from_string(std::string_view name) {
  if (name.empty() || name == "none") return Fault::none;
  if (name == "coupling-sign") return Fault::coupling_sign;
  throw ConfigError("unknown fault '" + std::string(name) + "'");
}

bool Report::all_pass() const {
  for (const auto& r : results) {
    if (!r.pass) return false;
  }
  return true;
}

std::vector<std::string> Report::failing() const {
  std::vector<std::string> out;
  for (const auto& r : results) {
    if (!r.pass) out.push_back(r.info.name);
  }
  return out;
}

std::vector<CheckInfo> list_checks() {
  std::vector<CheckInfo> out;
  for (const auto& c : checks()) out.push_back(c.info);
  return out;
}

Report run(const Options& options) {
  for (const auto& name : options.only) {
    bool found = false;
    for (const auto& c : checks()) found = found || c.info.name == name;
    if (!found) throw ConfigError("unknown check '" + name + "'");
  }
  Context ctx{options.fault};
  Report report;
  for (const auto& c : checks()) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), c.info.name) == options.only.end()) {
      continue;
    }
    CheckResult r;
    r.info = c.info;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const auto o = c.run(ctx);
      r.pass = o.pass;
      r.detail = o.detail;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.results.push_back(std::move(r));
  }
  return report;
}

}  // namespace frictionlab::verify
