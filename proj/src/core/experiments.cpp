#include "core/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "core/error.hpp"
#include "core/fit.hpp"
#include "core/log.hpp"

namespace frictionlab::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  if (s.empty()) return kNaN;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc()) throw ConfigError("bad number '" + std::string(s) + "' in sweep CSV");
  return v;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto at = line.find(sep, pos);
    out.emplace_back(line.substr(pos, at == std::string_view::npos ? std::string_view::npos : at - pos));
    if (at == std::string_view::npos) break;
    pos = at + 1;
  }
  return out;
}

void add_flag(SweepRow& row, const std::string& flag) {
  if (std::find(row.flags.begin(), row.flags.end(), flag) == row.flags.end()) row.flags.push_back(flag);
}

void mark_health(SweepRow& row, double e_p0) {
  if (!(row.top_weight < kHealthyTopWeight)) add_flag(row, "unhealthy");
  if (row.e0 > e_p0 + kMonotoneSlack) add_flag(row, "variational");
}

std::string row_line(const SweepResult& result, const SweepRow& row) {
  std::string line = format_double(row.param) + "," + format_double(row.e0) + "," +
                     format_double(row.n_expect) + "," + format_double(row.residual) + "," +
                     format_double(row.top_weight) + ",";
  for (std::size_t i = 0; i < row.flags.size(); ++i) {
    if (i) line += '|';
    line += row.flags[i];
  }
  for (const auto& col : result.extra_columns) {
    auto it = row.extra.find(col);
    line += ",";
    line += format_double(it == row.extra.end() ? kNaN : it->second);
  }
  return line;
}

std::string header_line(const SweepResult& result) {
  std::string h = "param,E0,N_expect,residual,top_weight,flags";
  for (const auto& col : result.extra_columns) h += "," + col;
  return h;
}

// Runs the rows of a sweep, possibly in parallel, persisting each finished
// row. Rows already present in the CSV (same param, bit for bit) are reused.
void run_rows(SweepResult& result, const std::vector<double>& params,
              const std::function<SweepRow(std::size_t)>& compute, const SweepIo& io) {
  const std::size_t count = params.size();
  std::vector<std::optional<SweepRow>> rows(count);

  if (!io.csv_path.empty() && io.resume && std::filesystem::exists(io.csv_path)) {
    std::ifstream in(io.csv_path);
    std::size_t reused = 0;
    for (auto& old : read_csv(in)) {
      for (std::size_t i = 0; i < count; ++i) {
        if (!rows[i] && old.param == params[i]) {
          rows[i] = old;
          ++reused;
          break;
        }
      }
    }
    if (reused > 0) result.notes.push_back("resumed " + std::to_string(reused) + " row(s) from " + io.csv_path);
  }

  std::mutex sink_mutex;
  std::ofstream sink;
  if (!io.csv_path.empty()) {
    const bool fresh = !std::filesystem::exists(io.csv_path) || !io.resume ||
                       std::filesystem::file_size(io.csv_path) == 0;
    sink.open(io.csv_path, fresh ? std::ios::trunc : std::ios::app);
    if (!sink) throw ConfigError("cannot write sweep CSV '" + io.csv_path + "'");
    if (fresh) sink << header_line(result) << '\n' << std::flush;
  }

  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < count; ++i) {
    if (!rows[i]) todo.push_back(i);
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const std::size_t i = todo[k];
      try {
        SweepRow row = compute(i);
        row.param = params[i];
        std::lock_guard lock(sink_mutex);
        if (sink.is_open()) sink << row_line(result, row) << '\n' << std::flush;
        rows[i] = std::move(row);
      } catch (...) {
        std::lock_guard lock(sink_mutex);
        if (!failure) failure = std::current_exception();
        next = todo.size();
        return;
      }
    }
  };

  const std::size_t threads = std::min(thread_count(io.threads), std::max<std::size_t>(1, todo.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  result.rows.clear();
  for (auto& r : rows) result.rows.push_back(std::move(*r));

  // Final file in grid order, replaced atomically.
  if (!io.csv_path.empty()) {
    sink.close();
    const std::string tmp = io.csv_path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::trunc);
      write_csv(out, result);
    }
    std::filesystem::rename(tmp, io.csv_path);
  }
}

std::vector<double> as_doubles(const std::vector<int>& v) { return {v.begin(), v.end()}; }
std::vector<double> as_doubles(const std::vector<unsigned>& v) { return {v.begin(), v.end()}; }

double operator_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

std::size_t strongest_mode(const quad::ModeSet& modes) {
  std::size_t best = 0;
  double best_norm = -1.0;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    const double nrm = operator_norm(modes.modes[j].coupling);
    if (nrm > best_norm) {
      best_norm = nrm;
      best = j;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::sigma: return "sigma";
    case SweepKind::support: return "support";
    case SweepKind::truncation: return "truncation";
    case SweepKind::classical_force: return "classical_force";
  }
  return "?";
}

bool SweepRow::healthy() const {
  return std::find(flags.begin(), flags.end(), "unhealthy") == flags.end();
}

std::size_t thread_count(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FRICTIONLAB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 1;
}

// ---------------------------------------------------------------------------

QuantumSetup quantum_setup(const config::Settings& settings) {
  QuantumSetup s;
  s.config = settings.model_config();
  s.config.rho1 = s.config.rho1.scaled(settings.quantum.coupling);
  s.grid = settings.quantum.grid;
  s.particle_levels = settings.quantum.n_p;
  s.modes = settings.quantum.modes;
  s.n_max = settings.quantum.n_max;
  s.eigen = settings.quantum.eigen;
  return s;
}

QuantumProblem build_problem(const model::ParticleBasis& basis, quad::ModeSet modes,
                             unsigned n_max) {
  QuantumProblem p;
  p.basis = basis;
  p.modes = std::move(modes);
  p.fock = std::make_unique<fock::FockBasis>(p.modes.size(), n_max);
  p.hamiltonian = fock::build_hamiltonian(basis.energies(), p.modes, *p.fock);
  p.e_p0 = basis.ground_energy();
  return p;
}

QuantumProblem build_problem(const QuantumSetup& setup) {
  setup.config.validate();
  if (setup.config.d != 1) throw PreconditionError("the quantum solver supports d = 1 only");
  auto basis = model::build_particle_basis(setup.config.potential, setup.grid, setup.particle_levels);
  auto modes = quad::discretize_modes(setup.config, basis, setup.modes);
  return build_problem(basis, std::move(modes), setup.n_max);
}

QuantumProblem vanhove_problem(const VanHoveSpec& spec) {
  auto basis = model::build_particle_basis(model::Potential::harmonic(1.0), {}, spec.particle_levels);
  auto modes = quad::ModeSet::scalar(spec.omegas, spec.couplings, basis.size());
  return build_problem(basis, std::move(modes), spec.n_max);
}

SolveSummary solve_problem(const QuantumProblem& problem, const fock::EigenOptions& options,
                           fock::GroundState* keep) {
  fock::GroundState gs = fock::ground_state(problem.hamiltonian, options);
  gs.top_sector_weight = fock::top_sector_weight(*problem.fock, problem.basis.size(), gs.vector);
  const auto obs = fock::observables(gs, *problem.fock, problem.basis.size());
  SolveSummary s;
  s.e0 = gs.energy;
  s.e_p0 = problem.e_p0;
  s.n_expect = obs.n_expect;
  s.residual = gs.residual;
  s.top_weight = gs.top_sector_weight;
  s.occupations = obs.occupations;
  s.dimension = problem.hamiltonian.dimension();
  s.modes = problem.modes.size();
  if (keep) *keep = std::move(gs);
  return s;
}

OccupancyDecay occupancy_decay(const QuantumProblem& problem, const fock::EigenOptions& options,
                               int p_from) {
  OccupancyDecay out;
  out.solve = solve_problem(problem, options);
  out.coupling_norms = quad::coupling_norms_by_label(problem.modes);
  out.per_label.assign(out.coupling_norms.size(), 0.0);
  for (std::size_t j = 0; j < problem.modes.size(); ++j) {
    const auto& m = problem.modes.modes[j];
    const int label = problem.modes.spatial.empty() ? 0 : problem.modes.spatial[m.spatial].label;
    out.per_label[static_cast<std::size_t>(std::abs(label))] += out.solve.occupations[j];
  }
  // Too few labels for a tail: leave the fits at NaN.
  out.occupation_fit = out.coupling_fit = {kNaN, kNaN};
  if (out.per_label.size() >= static_cast<std::size_t>(std::max(1, p_from)) + 2) {
    out.occupation_fit = quad::tail_decay_power(out.per_label, p_from);
    out.coupling_fit = quad::tail_decay_power(out.coupling_norms, p_from);
  }
  return out;
}

OccupancyDecay occupancy_decay(const QuantumSetup& setup, int p_from) {
  return occupancy_decay(build_problem(setup), setup.eigen, p_from);
}

namespace {

SweepRow row_from(const SolveSummary& s) {
  SweepRow row;
  row.e0 = s.e0;
  row.n_expect = s.n_expect;
  row.residual = s.residual;
  row.top_weight = s.top_weight;
  mark_health(row, s.e_p0);
  return row;
}

bool all_healthy(const SweepResult& r) {
  return std::all_of(r.rows.begin(), r.rows.end(), [](const SweepRow& row) { return row.healthy(); });
}

bool variational_ok(const SweepResult& r) {
  return std::none_of(r.rows.begin(), r.rows.end(), [](const SweepRow& row) {
    return std::find(row.flags.begin(), row.flags.end(), "variational") != row.flags.end();
  });
}

}  // namespace

SweepResult sweep_sigma(const QuantumSetup& setup, const std::vector<double>& sigmas,
                        const SweepIo& io) {
  if (sigmas.size() < 4) throw PreconditionError("a sweep needs at least 4 grid points");
  for (std::size_t i = 1; i < sigmas.size(); ++i) {
    if (!(sigmas[i] < sigmas[i - 1])) throw PreconditionError("sigma grid must be strictly decreasing");
  }
  if (!(sigmas.back() > 0.0)) throw PreconditionError("sigma grid must stay positive");

  QuantumSetup base = setup;
  if (base.modes.omega_min <= 0.0) base.modes.omega_min = 0.5 * sigmas.back();
  if (sigmas.back() < base.modes.omega_min) {
    throw PreconditionError("sigma grid reaches below the shell grid's omega_min");
  }
  const auto basis = model::build_particle_basis(base.config.potential, base.grid, base.particle_levels);

  SweepResult result;
  result.kind = SweepKind::sigma;
  result.extra_columns = {"bound", "modes", "e_p0"};

  run_rows(result, sigmas, [&](std::size_t i) {
    model::ModelConfig cfg = base.config;
    cfg.sigma = sigmas[i];
    auto modes = quad::discretize_modes(cfg, basis, base.modes);
    const auto problem = build_problem(basis, std::move(modes), base.n_max);
    const auto s = solve_problem(problem, base.eigen);
    SweepRow row = row_from(s);
    row.extra["bound"] = quad::soft_boson_bound(cfg, sigmas[i]);
    row.extra["modes"] = static_cast<double>(s.modes);
    row.extra["e_p0"] = s.e_p0;
    if (row.n_expect > row.extra["bound"]) add_flag(row, "above_bound");
    return row;
  }, io);

  const auto& rows = result.rows;
  bool monotone = true, below = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && !(rows[i].n_expect > rows[i - 1].n_expect)) monotone = false;
    if (rows[i].n_expect > rows[i].extra.at("bound")) below = false;
  }
  result.summary["healthy"] = all_healthy(result);
  result.summary["variational"] = variational_ok(result);
  result.summary["n_monotone"] = monotone;
  result.summary["below_bound"] = below;
  result.summary["decades"] = std::log10(sigmas.front() / sigmas.back());

  std::vector<double> lx, n;
  for (const auto& r : rows) {
    lx.push_back(std::log(1.0 / r.param));
    n.push_back(r.n_expect);
  }
  const auto lf = fit::linear(lx, n);
  result.summary["log_r2"] = lf.r2;
  result.summary["log_slope"] = lf.slope;
  result.summary["log_intercept"] = lf.intercept;

  bool decreasing = true;
  for (std::size_t i = 2; i < rows.size(); ++i) {
    const double prev = std::abs(rows[i - 1].n_expect - rows[i - 2].n_expect);
    const double cur = std::abs(rows[i].n_expect - rows[i - 1].n_expect);
    if (!(cur < prev)) decreasing = false;
  }
  result.summary["increments_decreasing"] = decreasing;

  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->healthy()) {
      result.summary["smallest_healthy_sigma"] = it->param;
      break;
    }
  }
  return result;
}

SweepResult sweep_support(const QuantumSetup& setup, const std::vector<int>& labels,
                          const SweepIo& io) {
  if (labels.size() < 4) throw PreconditionError("a sweep needs at least 4 grid points");
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i] < labels[i - 1]) throw PreconditionError("support grid must be non-decreasing");
  }
  if (labels.front() < 0) throw PreconditionError("support labels must be >= 0");

  QuantumSetup base = setup;
  base.modes.max_label = std::max(base.modes.max_label, labels.back());
  const auto basis = model::build_particle_basis(base.config.potential, base.grid, base.particle_levels);
  const auto full = quad::discretize_modes(base.config, basis, base.modes);

  // Second-order bound on what the modes of one |p| can lower E_0 by.
  auto predicted = [&](int label) {
    double sum = 0.0;
    for (const auto& m : full.modes) {
      if (m.spatial < full.spatial.size() && std::abs(full.spatial[m.spatial].label) == label) {
        const double nrm = operator_norm(m.coupling);
        sum += nrm * nrm / m.omega;
      }
    }
    return sum;
  };

  SweepResult result;
  result.kind = SweepKind::support;
  result.extra_columns = {"predicted_increment", "modes", "e_p0"};

  run_rows(result, as_doubles(labels), [&](std::size_t i) {
    const auto problem = build_problem(basis, full.restricted_support(labels[i]), base.n_max);
    const auto s = solve_problem(problem, base.eigen);
    SweepRow row = row_from(s);
    row.extra["predicted_increment"] = predicted(labels[i]);
    row.extra["modes"] = static_cast<double>(s.modes);
    row.extra["e_p0"] = s.e_p0;
    return row;
  }, io);

  const auto& rows = result.rows;
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].e0 > rows[i - 1].e0 + kMonotoneSlack) monotone = false;
  }
  const std::size_t last = rows.size() - 1;
  std::size_t prev = last;
  while (prev > 0 && rows[prev].param == rows[last].param) --prev;
  const double last_inc = std::abs(rows[last].e0 - rows[prev].e0);
  const double pred = rows[last].extra.at("predicted_increment");
  result.summary["healthy"] = all_healthy(result);
  result.summary["variational"] = variational_ok(result);
  result.summary["monotone"] = monotone;
  result.summary["last_increment"] = last_inc;
  result.summary["predicted_increment"] = pred;
  result.summary["plateau_ok"] = last_inc <= pred + kMonotoneSlack;
  return result;
}

namespace {

SweepResult truncation_rows(const model::ParticleBasis& basis, const quad::ModeSet& modes,
                            const std::vector<unsigned>& n_max, const fock::EigenOptions& eigen,
                            std::optional<fock::VanHove> reference, const SweepIo& io) {
  if (n_max.size() < 4) throw PreconditionError("a sweep needs at least 4 grid points");
  for (std::size_t i = 1; i < n_max.size(); ++i) {
    if (!(n_max[i] > n_max[i - 1])) throw PreconditionError("N_max grid must be strictly increasing");
  }
  const std::size_t probe = strongest_mode(modes);
  const double probe_g = operator_norm(modes.modes.at(probe).coupling);

  SweepResult result;
  result.kind = SweepKind::truncation;
  result.extra_columns = {"pullthrough", "probe_mode", "probe_coupling", "dimension", "e_p0"};
  if (reference) result.extra_columns.push_back("reference_error");

  run_rows(result, as_doubles(n_max), [&](std::size_t i) {
    const auto problem = build_problem(basis, modes, n_max[i]);
    fock::GroundState gs;
    const auto s = solve_problem(problem, eigen, &gs);
    SweepRow row = row_from(s);
    row.extra["pullthrough"] =
        fock::pullthrough_residual(gs, problem.hamiltonian, *problem.fock, problem.modes, probe);
    row.extra["probe_mode"] = static_cast<double>(probe);
    row.extra["probe_coupling"] = probe_g;
    row.extra["dimension"] = static_cast<double>(s.dimension);
    row.extra["e_p0"] = s.e_p0;
    if (reference) row.extra["reference_error"] = std::abs(s.e0 - reference->energy);
    return row;
  }, io);

  const auto& rows = result.rows;
  bool monotone = true, decreasing = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].e0 > rows[i - 1].e0 + kMonotoneSlack) monotone = false;
    if (!(rows[i].extra.at("pullthrough") < rows[i - 1].extra.at("pullthrough"))) decreasing = false;
  }
  result.summary["variational"] = variational_ok(result);
  result.summary["monotone"] = monotone;
  result.summary["residual_decreasing"] = decreasing;
  result.summary["final_pullthrough"] = rows.back().extra.at("pullthrough");
  result.summary["probe_coupling"] = probe_g;
  if (reference) {
    result.summary["reference_energy"] = reference->energy;
    result.summary["reference_error"] = rows.back().extra.at("reference_error");
  }
  if (!monotone) {
    result.notes.push_back("E0 rose with N_max beyond 1e-10: enlarging the space cannot raise the minimum, solver fault");
  }
  return result;
}

}  // namespace

SweepResult truncation_convergence(const QuantumSetup& setup, const std::vector<unsigned>& n_max,
                                   const SweepIo& io) {
  const auto basis = model::build_particle_basis(setup.config.potential, setup.grid, setup.particle_levels);
  const auto modes = quad::discretize_modes(setup.config, basis, setup.modes);
  return truncation_rows(basis, modes, n_max, setup.eigen, std::nullopt, io);
}

SweepResult truncation_convergence(const VanHoveSpec& spec, const std::vector<unsigned>& n_max,
                                   const SweepIo& io) {
  const auto problem = vanhove_problem(spec);
  const auto reference = fock::vanhove_reference(problem.modes, problem.e_p0);
  return truncation_rows(problem.basis, problem.modes, n_max, {}, reference, io);
}

double driven_lattice_extent(const model::ModelConfig& config, double force, double duration,
                             double q0) {
  const double gamma = quad::friction_coefficient(config).gamma;
  double v = 0.0;
  if (force > 0.0 && gamma > 0.0) {
    v = config.n == 3 ? force / gamma : 4.0 * std::pow(force / gamma, 1.0 / (config.n - 2));
  }
  if (!(v < config.c) || gamma == 0.0) v = config.c;
  return q0 + 1.5 * v * duration + 2.0 * config.rho1.radius() + 1.0;
}

SweepResult classical_force_sweep(const ForceSweepSpec& spec, const std::vector<double>& forces,
                                  const SweepIo& io) {
  if (forces.size() < 3) throw PreconditionError("a force sweep needs at least 3 forces");
  const double gamma = quad::friction_coefficient(spec.config).gamma;
  const int n = spec.config.n;

  SweepResult result;
  result.kind = SweepKind::classical_force;
  result.extra_columns = {"v_inf", "rate", "asymptote", "r2", "gamma", "ratio"};

  run_rows(result, forces, [&](std::size_t i) {
    const double f = forces[i];
    model::ModelConfig cfg = spec.config;
    cfg.potential = model::Potential::linear({f, 0.0, 0.0});
    classical::RunParams run = spec.run;
    run.grid.x_hi = std::max(run.grid.x_hi, driven_lattice_extent(cfg, f, run.duration, run.q0[0]));
    const auto series = classical::run(cfg, run);
    SweepRow row;
    row.e0 = row.n_expect = row.residual = row.top_weight = kNaN;
    row.extra["gamma"] = gamma;
    if (f == 0.0) {
      const auto fitv = classical::fit_dynamics(series, classical::FitKind::asymptotic_velocity,
                                                spec.fit_start * run.duration, run.duration, 0.0);
      row.extra["v_inf"] = fitv.value;
      row.extra["rate"] = kNaN;
      row.extra["asymptote"] = kNaN;
      row.extra["r2"] = kNaN;
      row.extra["ratio"] = kNaN;
      return row;
    }
    const auto fitv = classical::fit_dynamics(series, classical::FitKind::asymptotic_velocity,
                                              spec.fit_start * run.duration, run.duration,
                                              spec.fit_from);
    row.extra["v_inf"] = fitv.value;
    row.extra["rate"] = fitv.rate;
    row.extra["asymptote"] = fitv.asymptote;
    row.extra["r2"] = fitv.r2;
    const double predicted = n == 3 ? f / gamma : std::pow(f / gamma, 1.0 / (n - 2));
    row.extra["ratio"] = fitv.value / predicted;
    if (fitv.low_confidence) add_flag(row, "low_confidence");
    return row;
  }, io);

  std::vector<double> fs, vs;
  double rmin = std::numeric_limits<double>::infinity(), rmax = -rmin;
  bool low = false;
  for (const auto& r : result.rows) {
    if (r.param > 0.0) {
      fs.push_back(r.param);
      vs.push_back(r.extra.at("v_inf"));
      rmin = std::min(rmin, r.extra.at("ratio"));
      rmax = std::max(rmax, r.extra.at("ratio"));
    }
    if (!r.flags.empty()) low = true;
  }
  result.summary["gamma"] = gamma;
  if (fs.size() >= 2) {
    const auto pe = classical::fit_power_exponent(fs, vs);
    result.summary["exponent"] = pe.value;
    result.summary["exponent_r2"] = pe.r2;
    result.summary["expected_exponent"] = 1.0 / (n - 2);
  }
  result.summary["ratio_min"] = rmin;
  result.summary["ratio_max"] = rmax;
  result.summary["low_confidence"] = low;
  return result;
}

// ---------------------------------------------------------------------------

void write_csv(std::ostream& out, const SweepResult& result) {
  out << header_line(result) << '\n';
  for (const auto& row : result.rows) out << row_line(result, row) << '\n';
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::vector<SweepRow> rows;
  std::string line;
  if (!std::getline(in, line)) return rows;
  const auto header = split(line, ',');
  if (header.size() < 6 || header[0] != "param") throw ConfigError("not a sweep CSV");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (cells.size() != header.size()) continue;  // torn last line from an interrupted run
    SweepRow row;
    row.param = parse_double(cells[0]);
    row.e0 = parse_double(cells[1]);
    row.n_expect = parse_double(cells[2]);
    row.residual = parse_double(cells[3]);
    row.top_weight = parse_double(cells[4]);
    if (!cells[5].empty()) row.flags = split(cells[5], '|');
    for (std::size_t c = 6; c < cells.size(); ++c) row.extra[header[c]] = parse_double(cells[c]);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return config::hash_hex(config::fnv1a(buf.str()));
}

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const std::string& path, const Manifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config"] = m.config_text;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["started"] = m.started;
  j["finished"] = m.finished;
  j["outputs"] = nlohmann::json::array();
  for (const auto& e : m.outputs) j["outputs"].push_back({{"path", e.path}, {"hash", e.hash}});
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write manifest '" + path + "'");
  out << j.dump(2) << '\n';
}

Manifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read manifest '" + path + "'");
  Manifest m;
  try {
    const auto j = nlohmann::json::parse(in);
    m.command = j.at("command").get<std::string>();
    m.config_text = j.at("config").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.version = j.value("version", "");
    m.started = j.value("started", "");
    m.finished = j.value("finished", "");
    for (const auto& e : j.at("outputs")) {
      m.outputs.push_back({e.at("path").get<std::string>(), e.at("hash").get<std::string>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed manifest '" + path + "': " + e.what());
  }
  return m;
}

std::vector<std::string> check_manifest(const std::string& path) {
  std::vector<std::string> problems;
  const Manifest m = read_manifest(path);
  const std::string recomputed = config::config_hash(config::parse(m.config_text));
  if (recomputed != m.config_hash) {
    problems.push_back("config hash " + m.config_hash + " does not match recomputed " + recomputed);
  }
  const auto base = std::filesystem::path(path).parent_path();
  for (const auto& e : m.outputs) {
    std::filesystem::path p = e.path;
    if (p.is_relative()) p = base / p;
    if (!std::filesystem::exists(p)) {
      problems.push_back("missing output " + e.path);
      continue;
    }
    const std::string h = file_hash(p.string());
    if (h != e.hash) problems.push_back("hash mismatch for " + e.path + ": " + h + " != " + e.hash);
  }
  return problems;
}

}  // namespace frictionlab::experiments
