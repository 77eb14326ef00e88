#include "frictionlab/frictionlab.h"

#include <cmath>
#include <filesystem>
#include <memory>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core/classical.hpp"
#include "core/config.hpp"
#include "core/error.hpp"
#include "core/experiments.hpp"
#include "core/fock.hpp"
#include "core/log.hpp"
#include "core/quadrature.hpp"
#include "core/verify.hpp"

#ifndef FRICTIONLAB_VERSION
#define FRICTIONLAB_VERSION "0.0.0"
#endif

using namespace frictionlab;

struct fl_config {
  config::Settings settings;
  mutable std::string scratch;
};

struct fl_result {
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, std::string>> strings;
  std::vector<std::pair<std::string, std::string>> tables;

  void scalar(std::string name, double v) { scalars.emplace_back(std::move(name), v); }
  void string(std::string name, std::string v) { strings.emplace_back(std::move(name), std::move(v)); }
  void table(std::string name, std::string v) { tables.emplace_back(std::move(name), std::move(v)); }
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_now;

fl_status fail(fl_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename F>
fl_status guarded(F&& body) {
  g_last_error.clear();
  try {
    return body();
  } catch (const ConfigError& e) {
    return fail(FL_ERR_CONFIG, e.what());
  } catch (const PreconditionError& e) {
    return fail(FL_ERR_PRECONDITION, e.what());
  } catch (const DivergenceError& e) {
    return fail(FL_ERR_DIVERGENCE, e.what());
  } catch (const AmbiguousFitError& e) {
    return fail(FL_ERR_AMBIGUOUS, e.what());
  } catch (const NumericalError& e) {
    return fail(FL_ERR_NUMERICAL, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(FL_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(FL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FL_ERR_INTERNAL, "unknown error");
  }
}

fl_status null_arg(const char* what) { return fail(FL_ERR_ARGUMENT, std::string("null ") + what); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

double max_drift(const classical::TimeSeries& s) {
  if (s.size() == 0) return 0.0;
  // Relative to the energy scale of the run, not E(0), which can be 0.
  const double e0 = s.e_total.front();
  double scale = std::abs(e0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    scale = std::max(scale, std::abs(s.e_particle[i]) + std::abs(s.e_field[i]) + std::abs(s.e_interaction[i]));
  }
  scale = std::max(scale, 1e-300);
  double drift = 0.0;
  for (double e : s.e_total) drift = std::max(drift, std::abs(e - e0) / scale);
  return drift;
}

classical::RunParams run_params(const config::Settings& s, const model::ModelConfig& cfg) {
  const auto& c = s.classical;
  classical::RunParams rp;
  rp.duration = c.duration;
  rp.grid = c.grid;
  rp.dt = c.dt > 0.0 ? c.dt : 0.8 * c.grid.h_r / cfg.c;
  rp.stride = static_cast<std::size_t>(std::max(1.0, std::round(c.sample_dt / rp.dt)));
  rp.q0 = {c.q0, 0.0, 0.0};
  rp.p0 = {c.p0, 0.0, 0.0};
  return rp;
}

void add_summary(fl_result& r, const experiments::SweepResult& sweep) {
  for (const auto& [k, v] : sweep.summary) r.scalar(k, v);
  std::string notes;
  for (const auto& n : sweep.notes) notes += n + "\n";
  r.string("kind", std::string(experiments::to_string(sweep.kind)));
  r.string("notes", notes);
  std::ostringstream csv;
  experiments::write_csv(csv, sweep);
  r.table("sweep", csv.str());
}

template <typename T>
std::vector<T> integer_grid(const std::vector<double>& v, const char* what) {
  std::vector<T> out;
  for (double x : v) {
    if (x < 0.0 || std::floor(x) != x) throw ConfigError(std::string(what) + " must hold non-negative integers");
    out.push_back(static_cast<T>(x));
  }
  return out;
}

}  // namespace

extern "C" {

int fl_exit_code(fl_status status) {
  switch (status) {
    case FL_OK: return 0;
    case FL_ERR_ARGUMENT:
    case FL_ERR_CONFIG:
    case FL_ERR_PRECONDITION:
    case FL_ERR_IO: return 2;
    default: return 1;
  }
}

const char* fl_status_name(fl_status status) {
  switch (status) {
    case FL_OK: return "ok";
    case FL_ERR_ARGUMENT: return "argument";
    case FL_ERR_CONFIG: return "config";
    case FL_ERR_PRECONDITION: return "precondition";
    case FL_ERR_NUMERICAL: return "numerical";
    case FL_ERR_DIVERGENCE: return "divergence";
    case FL_ERR_AMBIGUOUS: return "ambiguous";
    case FL_ERR_IO: return "io";
    case FL_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fl_last_error(void) { return g_last_error.c_str(); }
const char* fl_version(void) { return FRICTIONLAB_VERSION; }

fl_status fl_set_log_level(int level) {
  if (level < 0 || level > 2) return fail(FL_ERR_ARGUMENT, "log level must be 0, 1 or 2");
  log::set_level(static_cast<log::Level>(level));
  return FL_OK;
}

// --- config -----------------------------------------------------------------

fl_status fl_config_new(fl_config** out) {
  if (!out) return null_arg("output pointer");
  return guarded([&] {
    *out = new fl_config{};
    return FL_OK;
  });
}

fl_status fl_config_parse(const char* text, fl_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    auto* c = new fl_config{};
    try {
      c->settings = config::parse(text);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
    return FL_OK;
  });
}

fl_status fl_config_load(const char* path, fl_config** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    auto* c = new fl_config{};
    try {
      c->settings = config::load(path);
    } catch (...) {
      delete c;
      throw;
    }
    *out = c;
    return FL_OK;
  });
}

fl_status fl_config_clone(const fl_config* config, fl_config** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("output pointer");
  return guarded([&] {
    *out = new fl_config{config->settings, {}};
    return FL_OK;
  });
}

void fl_config_free(fl_config* config) { delete config; }

fl_status fl_config_set(fl_config* config, const char* section, const char* key,
                        const char* value) {
  if (!config || !section || !key || !value) return null_arg("argument");
  return guarded([&] {
    config::set(config->settings, section, key, value);
    return FL_OK;
  });
}

const char* fl_config_get(const fl_config* config, const char* section, const char* key) {
  if (!config || !section || !key) {
    null_arg("argument");
    return nullptr;
  }
  const char* out = nullptr;
  guarded([&] {
    config->scratch = config::get(config->settings, section, key);
    out = config->scratch.c_str();
    return FL_OK;
  });
  return out;
}

const char* fl_config_canonical(const fl_config* config) {
  if (!config) return nullptr;
  config->scratch = config::canonical(config->settings);
  return config->scratch.c_str();
}

const char* fl_config_hash(const fl_config* config) {
  if (!config) return nullptr;
  config->scratch = config::config_hash(config->settings);
  return config->scratch.c_str();
}

// --- results ----------------------------------------------------------------

void fl_result_free(fl_result* result) { delete result; }

size_t fl_result_scalar_count(const fl_result* r) { return r ? r->scalars.size() : 0; }
const char* fl_result_scalar_name(const fl_result* r, size_t i) {
  return r && i < r->scalars.size() ? r->scalars[i].first.c_str() : nullptr;
}
double fl_result_scalar_value(const fl_result* r, size_t i) {
  return r && i < r->scalars.size() ? r->scalars[i].second : NAN;
}
fl_status fl_result_scalar(const fl_result* r, const char* name, double* value) {
  if (!r || !name || !value) return null_arg("argument");
  for (const auto& [k, v] : r->scalars) {
    if (k == name) {
      *value = v;
      return FL_OK;
    }
  }
  return fail(FL_ERR_ARGUMENT, std::string("no scalar named '") + name + "'");
}

size_t fl_result_string_count(const fl_result* r) { return r ? r->strings.size() : 0; }
const char* fl_result_string_name(const fl_result* r, size_t i) {
  return r && i < r->strings.size() ? r->strings[i].first.c_str() : nullptr;
}
const char* fl_result_string_value(const fl_result* r, size_t i) {
  return r && i < r->strings.size() ? r->strings[i].second.c_str() : nullptr;
}
const char* fl_result_string(const fl_result* r, const char* name) {
  if (!r || !name) return nullptr;
  for (const auto& [k, v] : r->strings) {
    if (k == name) return v.c_str();
  }
  return nullptr;
}

size_t fl_result_table_count(const fl_result* r) { return r ? r->tables.size() : 0; }
const char* fl_result_table_name(const fl_result* r, size_t i) {
  return r && i < r->tables.size() ? r->tables[i].first.c_str() : nullptr;
}
const char* fl_result_table(const fl_result* r, const char* name) {
  if (!r || !name) return nullptr;
  for (const auto& [k, v] : r->tables) {
    if (k == name) return v.c_str();
  }
  return nullptr;
}

fl_status fl_result_write_table(const fl_result* r, const char* name, const char* path) {
  if (!r || !name || !path) return null_arg("argument");
  const char* text = fl_result_table(r, name);
  if (!text) return fail(FL_ERR_ARGUMENT, std::string("no table named '") + name + "'");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return fail(FL_ERR_IO, std::string("cannot write '") + path + "'");
  out << text;
  out.flush();
  if (!out) return fail(FL_ERR_IO, std::string("write failed for '") + path + "'");
  return FL_OK;
}

// --- computations -----------------------------------------------------------

fl_status fl_gamma(const fl_config* config, int check_scaling, fl_result** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    const auto cfg = config->settings.model_config();
    cfg.validate();
    const auto g = quad::friction_coefficient(cfg);
    auto r = std::make_unique<fl_result>();
    r->scalar("gamma", g.gamma);
    r->scalar("rho2_hat_zero", g.rho2_hat_zero);
    r->scalar("momentum_integral", g.momentum_integral);
    r->scalar("prefactor", g.prefactor);

    // Radial integrand of the momentum integral over R^{n+d-1}.
    const int dim = cfg.n + cfg.d - 1;
    const double area = model::sphere_area(dim);
    std::ostringstream table;
    table << "s,rho1_hat,integrand\n";
    const double s_max = 40.0 / cfg.rho1.radius();
    for (int i = 0; i <= 400; ++i) {
      const double s = s_max * i / 400.0;
      const double f = model::radial_fourier(cfg.rho1, cfg.d, s);
      table << num(s) << ',' << num(f) << ',' << num(area * std::pow(s, dim - 1) * f * f) << '\n';
    }
    r->table("integrand", table.str());

    if (check_scaling) {
      auto c1 = cfg;
      c1.rho1 = c1.rho1.scaled(2.0);
      auto c2 = cfg;
      c2.rho2 = c2.rho2.scaled(2.0);
      auto c3 = cfg;
      c3.c *= 2.0;
      const double s1 = quad::friction_coefficient(c1).gamma;
      const double s2 = quad::friction_coefficient(c2).gamma;
      const double s3 = quad::friction_coefficient(c3).gamma;
      auto close = [&](double v, double want) {
        if (want == 0.0) return v == 0.0;
        return std::abs(v - want) <= 1e-12 * std::abs(want);
      };
      const bool ok = close(s1, 4.0 * g.gamma) && close(s2, 4.0 * g.gamma) && close(s3, g.gamma / 8.0);
      r->scalar("scaling_rho1", g.gamma > 0 ? s1 / g.gamma : 0.0);
      r->scalar("scaling_rho2", g.gamma > 0 ? s2 / g.gamma : 0.0);
      r->scalar("scaling_c", g.gamma > 0 ? s3 / g.gamma : 0.0);
      r->scalar("scaling_ok", ok ? 1.0 : 0.0);
    }
    *out = r.release();
    return FL_OK;
  });
}

fl_status fl_ir(const fl_config* config, const double* sigmas, size_t count, const char* dressed,
                double q, fl_result** out) {
  if (!config) return null_arg("config");
  if (!sigmas && count > 0) return null_arg("sigma grid");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    const auto cfg = config->settings.model_config();
    cfg.validate();
    const std::vector<double> grid(sigmas, sigmas + count);
    quad::IrReport rep;
    std::string which = dressed ? dressed : "";
    if (which.empty() || which == "none") {
      rep = quad::classify_ir(cfg.rho2, cfg.n, grid, cfg.dispersion);
      which = "bare";
    } else if (which == "membrane") {
      rep = quad::classify_dressed(quad::DressedModel::membrane, cfg, q, grid);
    } else if (which == "nelson") {
      rep = quad::classify_dressed(quad::DressedModel::nelson, cfg, q, grid);
    } else {
      throw ConfigError("dressed model must be membrane or nelson, got '" + which + "'");
    }
    auto r = std::make_unique<fl_result>();
    r->string("classification", std::string(quad::to_string(rep.classification)));
    r->string("integral", which);
    r->scalar("a", rep.a);
    r->scalar("b", rep.b);
    r->scalar("exponent", rep.exponent);
    r->scalar("fit_r2", rep.fit_r2);
    r->scalar("r2_convergent", rep.r2_convergent);
    r->scalar("r2_log", rep.r2_log);
    r->scalar("r2_power", rep.r2_power);
    std::ostringstream csv;
    quad::write_csv(csv, rep);
    r->table("ir", csv.str());
    *out = r.release();
    return FL_OK;
  });
}

fl_status fl_classical(const fl_config* config, fl_result** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    const auto& s = config->settings;
    auto cfg = s.model_config();
    auto rp = run_params(s, cfg);
    const bool driven = s.classical.drive == config::Drive::force;
    const double force = s.classical.force;
    if (driven) {
      cfg.potential = model::Potential::linear({force, 0.0, 0.0});
      rp.grid.x_hi = std::max(rp.grid.x_hi,
                              experiments::driven_lattice_extent(cfg, force, rp.duration, rp.q0[0]));
    }
    const double gamma = quad::friction_coefficient(cfg).gamma;
    const auto series = classical::run(cfg, rp);

    auto r = std::make_unique<fl_result>();
    r->scalar("gamma", gamma);
    r->scalar("dt", rp.dt);
    r->scalar("steps", std::round(rp.duration / rp.dt));
    r->scalar("energy_drift", max_drift(series));
    r->scalar("E_total_initial", series.e_total.front());
    r->scalar("E_total_final", series.e_total.back());
    r->scalar("q_final", series.q.back()[0]);
    r->scalar("p_final", series.p.back()[0]);
    r->string("drive", driven ? "force" : "confining");

    const bool coupled = cfg.rho1.amplitude() != 0.0 && cfg.rho2.amplitude() != 0.0;
    if (driven && rp.duration > 0.0) {
      const auto f = classical::fit_dynamics(series, classical::FitKind::asymptotic_velocity,
                                             s.classical.fit_start * rp.duration, rp.duration,
                                             force != 0.0 ? s.classical.fit_from : 0.0);
      r->scalar("v_inf", f.value);
      r->scalar("rate", f.rate);
      r->scalar("asymptote", f.asymptote);
      r->scalar("fit_r2", f.r2);
      r->scalar("low_confidence", f.low_confidence ? 1.0 : 0.0);
      if (force != 0.0 && gamma > 0.0) {
        const double predicted = cfg.n == 3 ? force / gamma : std::pow(force / gamma, 1.0 / (cfg.n - 2));
        r->scalar("v_predicted", predicted);
        r->scalar("ratio", f.value / predicted);
        if (cfg.n == 3) r->scalar("rate_ratio", f.rate / gamma);
      }
    } else if (!driven && coupled && rp.duration > 0.0) {
      const double center = s.model.potential.center[0];
      const auto f = classical::fit_dynamics(series, classical::FitKind::decay_rate, 0.0,
                                             rp.duration, 0.0, center);
      r->scalar("envelope_rate", f.value);
      r->scalar("fit_r2", f.r2);
      r->scalar("low_confidence", f.low_confidence ? 1.0 : 0.0);
      if (gamma > 0.0) r->scalar("rate_ratio", f.value / (gamma / 2.0));
    }
    std::ostringstream csv;
    classical::write_csv(csv, series);
    r->table("series", csv.str());
    *out = r.release();
    return FL_OK;
  });
}

fl_status fl_quantum_solve(const fl_config* config, fl_result** out) {
  if (!config) return null_arg("config");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    const auto setup = experiments::quantum_setup(config->settings);
    const auto problem = experiments::build_problem(setup);
    const auto decay = experiments::occupancy_decay(problem, setup.eigen);
    const auto& s = decay.solve;
    auto r = std::make_unique<fl_result>();
    r->scalar("occupancy_power", decay.occupation_fit.power);
    r->scalar("occupancy_r2", decay.occupation_fit.r2);
    r->scalar("coupling_power", decay.coupling_fit.power);
    r->scalar("E0", s.e0);
    r->scalar("E_p0", s.e_p0);
    r->scalar("N_expect", s.n_expect);
    r->scalar("residual", s.residual);
    r->scalar("top_weight", s.top_weight);
    r->scalar("dimension", static_cast<double>(s.dimension));
    r->scalar("modes", static_cast<double>(s.modes));
    r->scalar("variational_ok", s.e0 <= s.e_p0 + experiments::kMonotoneSlack ? 1.0 : 0.0);
    r->scalar("healthy", s.top_weight < experiments::kHealthyTopWeight ? 1.0 : 0.0);
    r->string("config_hash", config::config_hash(config->settings));
    std::ostringstream csv;
    csv << "mode,label,shell,omega,occupation\n";
    for (std::size_t j = 0; j < problem.modes.size(); ++j) {
      const auto& m = problem.modes.modes[j];
      const int label = m.spatial < problem.modes.spatial.size() ? problem.modes.spatial[m.spatial].label : 0;
      csv << j << ',' << label << ',' << m.shell << ',' << num(m.omega) << ',' << num(s.occupations[j])
          << '\n';
    }
    r->table("occupations", csv.str());
    *out = r.release();
    return FL_OK;
  });
}

fl_status fl_quantum_vanhove(unsigned n_max, fl_result** out) {
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    experiments::VanHoveSpec spec;
    spec.n_max = n_max;
    const auto problem = experiments::vanhove_problem(spec);
    const auto ref = fock::vanhove_reference(problem.modes, problem.e_p0);
    fock::GroundState gs;
    const auto s = experiments::solve_problem(problem, {}, &gs);
    auto r = std::make_unique<fl_result>();
    r->scalar("E0", s.e0);
    r->scalar("E_reference", ref.energy);
    r->scalar("energy_error", std::abs(s.e0 - ref.energy));
    double occ = 0.0;
    std::ostringstream csv;
    csv << "mode,omega,g,occupation,reference,pullthrough\n";
    for (std::size_t j = 0; j < problem.modes.size(); ++j) {
      occ = std::max(occ, std::abs(s.occupations[j] - ref.occupations[j]));
      const double pt = fock::pullthrough_residual(gs, problem.hamiltonian, *problem.fock, problem.modes, j);
      csv << j << ',' << num(spec.omegas[j]) << ',' << num(spec.couplings[j]) << ','
          << num(s.occupations[j]) << ',' << num(ref.occupations[j]) << ',' << num(pt) << '\n';
      r->scalar("pullthrough_" + std::to_string(j), pt);
    }
    r->scalar("occupation_error", occ);
    r->scalar("top_weight", s.top_weight);
    r->scalar("residual", s.residual);
    r->table("vanhove", csv.str());
    *out = r.release();
    return FL_OK;
  });
}

fl_status fl_sweep(const fl_config* config, const char* kind, const char* csv_path,
                   fl_result** out) {
  if (!config) return null_arg("config");
  if (!kind) return null_arg("kind");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    const auto& s = config->settings;
    experiments::SweepIo io;
    if (csv_path) io.csv_path = csv_path;
    const std::string k = kind;
    experiments::SweepResult sweep;
    if (k == "sigma") {
      sweep = experiments::sweep_sigma(experiments::quantum_setup(s), s.sweep.sigma_grid, io);
    } else if (k == "support") {
      sweep = experiments::sweep_support(experiments::quantum_setup(s),
                                         integer_grid<int>(s.sweep.support_grid, "support_grid"), io);
    } else if (k == "truncation") {
      sweep = experiments::truncation_convergence(
          experiments::quantum_setup(s), integer_grid<unsigned>(s.sweep.n_max_grid, "n_max_grid"), io);
    } else if (k == "vanhove-truncation") {
      sweep = experiments::truncation_convergence(
          experiments::VanHoveSpec{}, integer_grid<unsigned>(s.sweep.n_max_grid, "n_max_grid"), io);
    } else if (k == "classical-force") {
      experiments::ForceSweepSpec spec;
      spec.config = s.model_config();
      spec.run = run_params(s, spec.config);
      spec.fit_start = s.classical.fit_start;
      spec.fit_from = s.classical.fit_from;
      sweep = experiments::classical_force_sweep(spec, s.sweep.force_grid, io);
    } else {
      throw ConfigError("unknown sweep kind '" + k + "'");
    }
    auto r = std::make_unique<fl_result>();
    add_summary(*r, sweep);
    r->string("config_hash", config::config_hash(s));
    *out = r.release();
    return FL_OK;
  });
}

fl_status fl_verify(const char* fault, const char* only, fl_result** out) {
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    verify::Options options;
    options.fault = verify::fault_from_string(fault ? fault : "");
    if (only && *only) {
      std::string list = only;
      std::size_t pos = 0;
      while (pos <= list.size()) {
        const auto comma = list.find(',', pos);
        const auto name = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!name.empty()) options.only.push_back(name);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
    }
    const auto report = verify::run(options);
    auto r = std::make_unique<fl_result>();
    std::ostringstream csv;
    csv << "check,pass,seconds,anchor,detail\n";
    for (const auto& c : report.results) {
      csv << c.info.name << ',' << (c.pass ? 1 : 0) << ',' << num(c.seconds) << ','
          << csv_quote(c.info.anchor) << ',' << csv_quote(c.detail) << '\n';
    }
    std::string failing;
    for (const auto& f : report.failing()) failing += (failing.empty() ? "" : ",") + f;
    r->scalar("passed", report.all_pass() ? 1.0 : 0.0);
    r->scalar("checks", static_cast<double>(report.results.size()));
    r->scalar("failures", static_cast<double>(report.failing().size()));
    r->string("failing", failing);
    r->table("checks", csv.str());
    *out = r.release();
    return FL_OK;
  });
}

fl_status fl_verify_list(fl_result** out) {
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    auto r = std::make_unique<fl_result>();
    std::ostringstream csv;
    csv << "check,anchor\n";
    for (const auto& c : verify::list_checks()) csv << c.name << ',' << csv_quote(c.anchor) << '\n';
    r->table("checks", csv.str());
    *out = r.release();
    return FL_OK;
  });
}

fl_status fl_manifest_write(const char* path, const fl_config* config, const char* command,
                            const char* started, const char* const* outputs, size_t count) {
  if (!path || !config || !command) return null_arg("argument");
  if (!outputs && count > 0) return null_arg("outputs");
  return guarded([&] {
    experiments::Manifest m;
    m.command = command;
    m.config_text = config::canonical(config->settings);
    m.config_hash = config::config_hash(config->settings);
    m.version = FRICTIONLAB_VERSION;
    m.started = started ? started : experiments::now_iso8601();
    m.finished = experiments::now_iso8601();
    const auto base = std::filesystem::absolute(std::filesystem::path(path)).parent_path();
    for (size_t i = 0; i < count; ++i) {
      const auto abs = std::filesystem::absolute(outputs[i]);
      m.outputs.push_back({std::filesystem::proximate(abs, base).string(),
                           experiments::file_hash(abs.string())});
    }
    experiments::write_manifest(path, m);
    return FL_OK;
  });
}

fl_status fl_manifest_check(const char* path, fl_result** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guarded([&] {
    const auto problems = experiments::check_manifest(path);
    auto r = std::make_unique<fl_result>();
    std::string text;
    for (const auto& p : problems) text += p + "\n";
    r->scalar("consistent", problems.empty() ? 1.0 : 0.0);
    r->string("problems", text);
    *out = r.release();
    return FL_OK;
  });
}

const char* fl_now(void) {
  g_now = experiments::now_iso8601();
  return g_now.c_str();
}

}  // extern "C"
