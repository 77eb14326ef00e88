// Command-line front end. Talks to the library exclusively via the C API.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "frictionlab/frictionlab.h"

namespace {

struct ConfigDeleter {
  void operator()(fl_config* c) const { fl_config_free(c); }
};
struct ResultDeleter {
  void operator()(fl_result* r) const { fl_result_free(r); }
};
using ConfigPtr = std::unique_ptr<fl_config, ConfigDeleter>;
using ResultPtr = std::unique_ptr<fl_result, ResultDeleter>;

// Thrown to unwind with an exit code after the message was printed.
struct Exit {
  int code;
};

void check(fl_status status, const std::string& what) {
  if (status == FL_OK) return;
  std::cerr << "frictionlab: " << what << " failed (" << fl_status_name(status)
            << "): " << fl_last_error() << '\n';
  throw Exit{fl_exit_code(status)};
}

double scalar(const fl_result* r, const char* name) {
  double v = NAN;
  fl_result_scalar(r, name, &v);
  return v;
}

bool has_scalar(const fl_result* r, const char* name) {
  double v;
  return fl_result_scalar(r, name, &v) == FL_OK;
}

std::string fmt(double v, int precision = 10) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

struct Global {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_dir = ".";
  bool quiet = false;
  bool verbose = false;
  bool no_manifest = false;
  std::string started;
};

ConfigPtr load_config(const Global& g) {
  fl_config* raw = nullptr;
  if (g.config_path.empty()) check(fl_config_new(&raw), "creating default config");
  else check(fl_config_load(g.config_path.c_str(), &raw), "loading config");
  ConfigPtr cfg(raw);
  for (const auto& s : g.sets) {
    const auto dot = s.find('.');
    const auto eq = s.find('=');
    if (dot == std::string::npos || eq == std::string::npos || dot > eq) {
      std::cerr << "frictionlab: --set expects section.key=value, got '" << s << "'\n";
      throw Exit{2};
    }
    check(fl_config_set(cfg.get(), s.substr(0, dot).c_str(), s.substr(dot + 1, eq - dot - 1).c_str(),
                        s.substr(eq + 1).c_str()),
          "--set " + s);
  }
  return cfg;
}

void set(fl_config* cfg, const char* section, const char* key, const std::string& value) {
  check(fl_config_set(cfg, section, key, value.c_str()), std::string(section) + "." + key);
}

// Writes the named tables into out_dir and a manifest naming them.
void emit(const Global& g, const fl_config* cfg, const fl_result* r, const std::string& command,
          const std::vector<std::pair<std::string, std::string>>& tables) {
  std::filesystem::create_directories(g.out_dir);
  std::vector<std::string> paths;
  for (const auto& [table, file] : tables) {
    const std::string path = (std::filesystem::path(g.out_dir) / file).string();
    check(fl_result_write_table(r, table.c_str(), path.c_str()), "writing " + path);
    paths.push_back(path);
    if (!g.quiet) std::cout << "wrote " << path << '\n';
  }
  if (g.no_manifest) return;
  std::vector<const char*> ptrs;
  for (const auto& p : paths) ptrs.push_back(p.c_str());
  const std::string manifest = (std::filesystem::path(g.out_dir) / (command + ".manifest.json")).string();
  check(fl_manifest_write(manifest.c_str(), cfg, command.c_str(), g.started.c_str(), ptrs.data(),
                          ptrs.size()),
        "writing manifest");
  if (!g.quiet) std::cout << "wrote " << manifest << '\n';
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      std::cerr << "frictionlab: bad number '" << item << "' in grid\n";
      throw Exit{2};
    }
  }
  return out;
}

std::vector<double> geometric(double hi, double lo, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(hi * std::pow(lo / hi, i / double(count - 1)));
  return out;
}

// --- subcommands -------------------------------------------------------------

struct GammaOpts {
  bool check_scaling = false;
};

int cmd_gamma(const Global& g, const GammaOpts& o) {
  auto cfg = load_config(g);
  fl_result* raw = nullptr;
  check(fl_gamma(cfg.get(), o.check_scaling ? 1 : 0, &raw), "gamma");
  ResultPtr r(raw);
  std::cout.precision(17);
  std::cout << "gamma = " << scalar(r.get(), "gamma") << '\n';
  std::cout << "  prefactor pi/c^3   = " << scalar(r.get(), "prefactor") << '\n';
  std::cout << "  |rho2_hat(0)|      = " << std::abs(scalar(r.get(), "rho2_hat_zero")) << '\n';
  std::cout << "  momentum integral  = " << scalar(r.get(), "momentum_integral") << '\n';
  int code = 0;
  if (o.check_scaling) {
    const bool ok = scalar(r.get(), "scaling_ok") == 1.0;
    std::cout << "scaling rho1 x2: x" << scalar(r.get(), "scaling_rho1") << "  rho2 x2: x"
              << scalar(r.get(), "scaling_rho2") << "  c x2: x" << scalar(r.get(), "scaling_c") << '\n';
    std::cout << "scaling check: " << (ok ? "pass" : "FAIL") << '\n';
    if (!ok) code = 1;
  }
  emit(g, cfg.get(), r.get(), "gamma", {{"integrand", "gamma_integrand.csv"}});
  return code;
}

struct IrOpts {
  std::string sigma_grid;
  std::string dressed;
  std::optional<int> d, n;
  double q = 1.0;
};

int cmd_ir(const Global& g, const IrOpts& o) {
  auto cfg = load_config(g);
  if (o.d) set(cfg.get(), "model", "d", std::to_string(*o.d));
  if (o.n) set(cfg.get(), "model", "n", std::to_string(*o.n));
  const auto sigmas = o.sigma_grid.empty() ? geometric(1e-1, 1e-4, 13) : parse_grid(o.sigma_grid);
  fl_result* raw = nullptr;
  check(fl_ir(cfg.get(), sigmas.data(), sigmas.size(), o.dressed.empty() ? nullptr : o.dressed.c_str(),
              o.q, &raw),
        "ir");
  ResultPtr r(raw);
  std::cout << "integral: " << fl_result_string(r.get(), "integral") << '\n';
  std::cout << "fit r2: convergent " << fmt(scalar(r.get(), "r2_convergent"), 6) << ", log "
            << fmt(scalar(r.get(), "r2_log"), 6) << ", power " << fmt(scalar(r.get(), "r2_power"), 6)
            << '\n';
  std::cout << "classification: " << fl_result_string(r.get(), "classification") << '\n';
  emit(g, cfg.get(), r.get(), "ir", {{"ir", "ir.csv"}});
  return 0;
}

struct ClassicalOpts {
  std::optional<double> T, dt, force, c, h_r, q0, p0;
  std::optional<int> n;
  bool confining = false;
  bool rho1_off = false;
  bool absorbing = false;
  bool sweep_force = false;
  std::string force_grid;
  std::string csv;
};

int cmd_classical(const Global& g, const ClassicalOpts& o) {
  auto cfg = load_config(g);
  fl_config* c = cfg.get();
  if (o.T) set(c, "classical", "T", fmt(*o.T, 17));
  if (o.dt) set(c, "classical", "dt", fmt(*o.dt, 17));
  if (o.c) set(c, "model", "c", fmt(*o.c, 17));
  if (o.h_r) set(c, "classical", "h_r", fmt(*o.h_r, 17));
  if (o.q0) set(c, "classical", "q0", fmt(*o.q0, 17));
  if (o.p0) set(c, "classical", "p0", fmt(*o.p0, 17));
  if (o.n) set(c, "model", "n", std::to_string(*o.n));
  if (o.absorbing) set(c, "classical", "absorbing", "true");
  if (o.force) {
    set(c, "classical", "drive", "force");
    set(c, "classical", "force", fmt(*o.force, 17));
  }
  if (o.confining) set(c, "classical", "drive", "confining");
  if (o.rho1_off) set(c, "model", "rho1_amplitude", "0");

  if (o.sweep_force) {
    if (!o.force_grid.empty()) set(c, "sweep", "force_grid", o.force_grid);
    fl_result* raw = nullptr;
    check(fl_sweep(c, "classical-force", o.csv.empty() ? nullptr : o.csv.c_str(), &raw), "force sweep");
    ResultPtr r(raw);
    std::cout << fl_result_table(r.get(), "sweep");
    std::cout << "gamma = " << fmt(scalar(r.get(), "gamma")) << '\n';
    std::cout << "fitted exponent of v_inf vs F: " << fmt(scalar(r.get(), "exponent"), 6)
              << " (expected " << fmt(scalar(r.get(), "expected_exponent"), 6) << ", r2 "
              << fmt(scalar(r.get(), "exponent_r2"), 6) << ")\n";
    std::cout << "v_inf / v_predicted in [" << fmt(scalar(r.get(), "ratio_min"), 6) << ", "
              << fmt(scalar(r.get(), "ratio_max"), 6) << "]\n";
    emit(g, c, r.get(), "classical_force_sweep", {{"sweep", "classical_force_sweep.csv"}});
    return 0;
  }

  fl_result* raw = nullptr;
  check(fl_classical(c, &raw), "classical run");
  ResultPtr r(raw);
  std::cout << "gamma = " << fmt(scalar(r.get(), "gamma")) << ", dt = " << fmt(scalar(r.get(), "dt"))
            << ", steps = " << fmt(scalar(r.get(), "steps")) << '\n';
  std::cout << "energy: initial " << fmt(scalar(r.get(), "E_total_initial")) << ", final "
            << fmt(scalar(r.get(), "E_total_final")) << ", max relative drift "
            << fmt(scalar(r.get(), "energy_drift"), 4) << '\n';
  if (has_scalar(r.get(), "v_inf")) {
    std::cout << "v_inf = " << fmt(scalar(r.get(), "v_inf"));
    if (has_scalar(r.get(), "ratio")) {
      std::cout << ", predicted " << fmt(scalar(r.get(), "v_predicted")) << ", v_inf*gamma/F ratio "
                << fmt(scalar(r.get(), "ratio"), 6);
    }
    std::cout << '\n';
    std::cout << "approach rate = " << fmt(scalar(r.get(), "rate"), 6);
    if (has_scalar(r.get(), "rate_ratio")) std::cout << " (rate/gamma " << fmt(scalar(r.get(), "rate_ratio"), 6) << ")";
    std::cout << ", r2 " << fmt(scalar(r.get(), "fit_r2"), 6) << '\n';
  }
  if (has_scalar(r.get(), "envelope_rate")) {
    std::cout << "envelope decay rate = " << fmt(scalar(r.get(), "envelope_rate"), 6);
    if (has_scalar(r.get(), "rate_ratio")) std::cout << " (ratio to gamma/2: " << fmt(scalar(r.get(), "rate_ratio"), 6) << ")";
    std::cout << ", r2 " << fmt(scalar(r.get(), "fit_r2"), 6) << '\n';
  }
  if (has_scalar(r.get(), "low_confidence") && scalar(r.get(), "low_confidence") == 1.0) {
    std::cout << "warning: low-confidence fit (r2 < 0.9)\n";
  }
  emit(g, c, r.get(), "classical", {{"series", "classical.csv"}});
  return 0;
}

struct QuantumOpts {
  bool solve = false;
  std::string sweep;
  bool verify_truncation = false;
  bool vanhove = false;
  std::optional<int> n;
  std::optional<unsigned> n_max;
  std::string grid;
  std::string csv;
};

int print_sweep(const Global& g, const fl_config* cfg, const fl_result* r, const std::string& name) {
  std::cout << fl_result_table(r, "sweep");
  for (std::size_t i = 0; i < fl_result_scalar_count(r); ++i) {
    std::cout << fl_result_scalar_name(r, i) << " = " << fmt(fl_result_scalar_value(r, i), 8) << '\n';
  }
  if (const char* notes = fl_result_string(r, "notes"); notes && *notes) std::cout << notes;
  emit(g, cfg, r, name, {{"sweep", name + ".csv"}});
  return 0;
}

int cmd_quantum(const Global& g, const QuantumOpts& o) {
  const int modes = int(o.solve) + int(!o.sweep.empty()) + int(o.verify_truncation) + int(o.vanhove);
  if (modes != 1) {
    std::cerr << "frictionlab quantum: choose exactly one of --solve, --sweep, --verify-truncation, --vanhove\n";
    return 2;
  }
  auto cfg = load_config(g);
  fl_config* c = cfg.get();
  if (o.n) set(c, "model", "n", std::to_string(*o.n));
  if (o.n_max) set(c, "quantum", "n_max", std::to_string(*o.n_max));
  const char* csv = o.csv.empty() ? nullptr : o.csv.c_str();

  if (o.vanhove) {
    fl_result* raw = nullptr;
    check(fl_quantum_vanhove(o.n_max.value_or(8), &raw), "Van Hove comparison");
    ResultPtr r(raw);
    std::cout << "E0 solver = " << fmt(scalar(r.get(), "E0"), 15) << ", closed form = "
              << fmt(scalar(r.get(), "E_reference"), 15) << ", |dE| = " << fmt(scalar(r.get(), "energy_error"), 3)
              << '\n';
    std::cout << "max occupation error = " << fmt(scalar(r.get(), "occupation_error"), 3)
              << ", top sector weight = " << fmt(scalar(r.get(), "top_weight"), 3) << '\n';
    std::cout << fl_result_table(r.get(), "vanhove");
    emit(g, c, r.get(), "vanhove", {{"vanhove", "vanhove.csv"}});
    return 0;
  }
  if (o.solve) {
    fl_result* raw = nullptr;
    check(fl_quantum_solve(c, &raw), "quantum solve");
    ResultPtr r(raw);
    std::cout << "param,E0,N_expect,residual,top_weight,flags\n";
    std::string flags;
    if (scalar(r.get(), "healthy") != 1.0) flags = "unhealthy";
    if (scalar(r.get(), "variational_ok") != 1.0) flags += flags.empty() ? "variational" : "|variational";
    std::cout << "solve," << fmt(scalar(r.get(), "E0"), 15) << ',' << fmt(scalar(r.get(), "N_expect"), 10)
              << ',' << fmt(scalar(r.get(), "residual"), 3) << ',' << fmt(scalar(r.get(), "top_weight"), 3)
              << ',' << flags << '\n';
    std::cout << "E_p0 = " << fmt(scalar(r.get(), "E_p0"), 15) << ", modes = " << scalar(r.get(), "modes")
              << ", dimension = " << scalar(r.get(), "dimension") << '\n';
    if (const double pw = scalar(r.get(), "occupancy_power"); std::isfinite(pw)) {
      std::cout << "occupation tail power = " << fmt(pw, 4) << " (coupling norms "
                << fmt(scalar(r.get(), "coupling_power"), 4) << ")\n";
    }
    emit(g, c, r.get(), "quantum_solve", {{"occupations", "occupations.csv"}});
    return 0;
  }
  if (o.verify_truncation) {
    if (!o.grid.empty()) set(c, "sweep", "n_max_grid", o.grid);
    fl_result* raw = nullptr;
    check(fl_sweep(c, "truncation", csv, &raw), "truncation sweep");
    ResultPtr r(raw);
    return print_sweep(g, c, r.get(), "truncation");
  }
  std::string kind = o.sweep;
  if (kind == "sigma") {
    if (!o.grid.empty()) set(c, "sweep", "sigma_grid", o.grid);
  } else if (kind == "support") {
    if (!o.grid.empty()) set(c, "sweep", "support_grid", o.grid);
  } else {
    std::cerr << "frictionlab quantum: --sweep takes sigma or support\n";
    return 2;
  }
  fl_result* raw = nullptr;
  check(fl_sweep(c, kind.c_str(), csv, &raw), kind + " sweep");
  ResultPtr r(raw);
  print_sweep(g, c, r.get(), "sweep_" + kind);
  if (kind == "sigma") {
    double n = NAN;
    fl_result_scalar(r.get(), "n_monotone", &n);
    std::cout << "growth fit: <N> = " << fmt(scalar(r.get(), "log_intercept"), 6) << " + "
              << fmt(scalar(r.get(), "log_slope"), 6) << " ln(1/sigma), r2 = " << fmt(scalar(r.get(), "log_r2"), 6)
              << "; monotone " << (n == 1.0 ? "yes" : "no") << ", below bound "
              << (scalar(r.get(), "below_bound") == 1.0 ? "yes" : "no") << ", increments decreasing "
              << (scalar(r.get(), "increments_decreasing") == 1.0 ? "yes" : "no") << '\n';
  }
  return 0;
}

struct VerifyOpts {
  bool list = false;
  std::string fault;
  std::string only;
  std::vector<std::string> manifests;
};

int cmd_verify(const Global&, const VerifyOpts& o) {
  if (o.list) {
    fl_result* raw = nullptr;
    check(fl_verify_list(&raw), "listing checks");
    ResultPtr r(raw);
    std::cout << fl_result_table(r.get(), "checks");
    return 0;
  }
  bool ok = true;
  for (const auto& m : o.manifests) {
    fl_result* raw = nullptr;
    check(fl_manifest_check(m.c_str(), &raw), "checking manifest " + m);
    ResultPtr r(raw);
    const bool consistent = scalar(r.get(), "consistent") == 1.0;
    std::cout << "manifest " << m << ": " << (consistent ? "consistent" : "INCONSISTENT") << '\n';
    if (!consistent) std::cout << fl_result_string(r.get(), "problems");
    ok = ok && consistent;
  }
  if (!o.manifests.empty() && o.only.empty()) return ok ? 0 : 1;

  fl_result* raw = nullptr;
  check(fl_verify(o.fault.empty() ? nullptr : o.fault.c_str(), o.only.empty() ? nullptr : o.only.c_str(), &raw),
        "verify");
  ResultPtr r(raw);
  std::stringstream table(fl_result_table(r.get(), "checks"));
  std::string line;
  std::getline(table, line);  // header
  // check,pass,seconds,anchor,detail with the last two possibly quoted.
  while (std::getline(table, line)) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          cur += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    cells.push_back(cur);
    if (cells.size() < 5) continue;
    std::printf("%-4s %-24s %7.2fs  %s\n", cells[1] == "1" ? "ok" : "FAIL", cells[0].c_str(),
                std::stod(cells[2]), cells[4].c_str());
  }
  const bool passed = scalar(r.get(), "passed") == 1.0;
  if (passed) {
    std::cout << "verify: all " << scalar(r.get(), "checks") << " checks passed\n";
  } else {
    std::cout << "verify: failing invariant(s): " << fl_result_string(r.get(), "failing") << '\n';
  }
  return passed && ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frictionlab: friction model laboratory (gamma, IR, classical, quantum, verify)"};
  app.require_subcommand(1);
  app.fallthrough();
  Global g;
  app.add_option("--config", g.config_path, "config file (sectioned key=value)");
  app.add_option("--set", g.sets, "override a config key: section.key=value (repeatable)");
  app.add_option("--out-dir", g.out_dir, "directory for CSV outputs and manifests");
  app.add_flag("--quiet", g.quiet, "suppress warnings and file notices");
  app.add_flag("--verbose", g.verbose, "log progress information");
  app.add_flag("--no-manifest", g.no_manifest, "do not write run manifests");
  app.add_flag_callback("--version", [] {
    std::cout << "frictionlab " << fl_version() << '\n';
    throw CLI::Success();
  }, "print the version");

  GammaOpts gamma;
  auto* sg = app.add_subcommand("gamma", "friction coefficient and its integrand");
  sg->add_flag("--check-scaling", gamma.check_scaling, "verify the homogeneity laws");

  IrOpts ir;
  auto* si = app.add_subcommand("ir", "infrared integral over a sigma grid and its classification");
  si->add_option("--sigma-grid", ir.sigma_grid, "comma-separated cutoffs, descending");
  si->add_option("--dressed", ir.dressed, "dressed integral: membrane or nelson")
      ->check(CLI::IsMember({"membrane", "nelson"}));
  si->add_option("--d", ir.d, "particle dimension")->check(CLI::Range(1, 3));
  si->add_option("--n", ir.n, "membrane dimension")->check(CLI::Range(3, 5));
  si->add_option("--q", ir.q, "dressing displacement");

  ClassicalOpts cl;
  auto* sc = app.add_subcommand("classical", "classical particle-membrane dynamics");
  sc->add_option("--T", cl.T, "duration");
  sc->add_option("--dt", cl.dt, "time step (default 0.8 h_r / c)");
  auto* force_opt = sc->add_option("--force", cl.force, "constant driving force F (linear potential)");
  sc->add_flag("--confining", cl.confining, "use the model's confining potential")->excludes(force_opt);
  sc->add_flag("--rho1-off", cl.rho1_off, "decouple the particle (rho_1 = 0)");
  sc->add_option("--n", cl.n, "membrane dimension")->check(CLI::Range(3, 5));
  sc->add_option("--c", cl.c, "wave speed");
  sc->add_option("--h-r", cl.h_r, "radial spacing");
  sc->add_option("--q0", cl.q0, "initial position");
  sc->add_option("--p0", cl.p0, "initial momentum");
  sc->add_flag("--absorbing", cl.absorbing, "outgoing-wave boundary (n = 3)");
  sc->add_flag("--sweep-force", cl.sweep_force, "run the force sweep instead of a single run");
  sc->add_option("--force-grid", cl.force_grid, "forces for --sweep-force, comma separated");
  sc->add_option("--csv", cl.csv, "resumable row sink for --sweep-force");

  QuantumOpts qu;
  auto* sq = app.add_subcommand("quantum", "truncated Fock-space ground states and sweeps");
  sq->add_flag("--solve", qu.solve, "ground state of the configured model");
  sq->add_option("--sweep", qu.sweep, "sigma or support")->check(CLI::IsMember({"sigma", "support"}));
  sq->add_flag("--verify-truncation", qu.verify_truncation, "E0 and pullthrough residual against N_max");
  sq->add_flag("--vanhove", qu.vanhove, "closed-form Van Hove comparison");
  sq->add_option("--n", qu.n, "membrane dimension")->check(CLI::Range(3, 5));
  sq->add_option("--n-max", qu.n_max, "total occupation cap");
  sq->add_option("--grid", qu.grid, "swept values, comma separated");
  sq->add_option("--csv", qu.csv, "resumable row sink for sweeps");

  VerifyOpts ve;
  auto* sv = app.add_subcommand("verify", "run the property suite, exit 0 iff all pass");
  sv->add_flag("--list", ve.list, "list the checks and the claims they test");
  sv->add_option("--only", ve.only, "comma-separated subset of checks");
  sv->add_option("--manifest", ve.manifests, "re-derive the hashes of a run manifest (repeatable)");
  sv->add_option("--inject-fault", ve.fault, "")->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  fl_set_log_level(g.quiet ? 0 : (g.verbose ? 2 : 1));
  g.started = fl_now();
  try {
    if (sg->parsed()) return cmd_gamma(g, gamma);
    if (si->parsed()) return cmd_ir(g, ir);
    if (sc->parsed()) return cmd_classical(g, cl);
    if (sq->parsed()) return cmd_quantum(g, qu);
    if (sv->parsed()) return cmd_verify(g, ve);
  } catch (const Exit& e) {
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "frictionlab: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
