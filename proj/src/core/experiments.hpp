#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "core/classical.hpp"
#include "core/config.hpp"
#include "core/fock.hpp"
#include "core/quadrature.hpp"

namespace frictionlab::experiments {

inline constexpr double kHealthyTopWeight = 1e-6;
inline constexpr double kMonotoneSlack = 1e-10;

// Everything needed to build one truncated quantum problem.
struct QuantumSetup {
  model::ModelConfig config;
  model::GridSpec grid;
  std::size_t particle_levels = 3;
  quad::DiscretizationSpec modes;
  unsigned n_max = 2;
  fock::EigenOptions eigen;
};

QuantumSetup quantum_setup(const config::Settings& settings);

struct QuantumProblem {
  model::ParticleBasis basis;
  quad::ModeSet modes;
  std::unique_ptr<fock::FockBasis> fock;
  fock::SparseOperator hamiltonian;
  double e_p0 = 0.0;  // bare particle ground energy
};

QuantumProblem build_problem(const QuantumSetup& setup);
// Same basis, different modes (nested sweeps reuse the particle basis).
QuantumProblem build_problem(const model::ParticleBasis& basis, quad::ModeSet modes,
                             unsigned n_max);

// Two scalar modes (omega 1.5, 1.0; g 0.3, 0.2) on a harmonic particle.
struct VanHoveSpec {
  std::vector<double> omegas{1.5, 1.0};
  std::vector<double> couplings{0.3, 0.2};
  std::size_t particle_levels = 2;
  unsigned n_max = 8;
};
QuantumProblem vanhove_problem(const VanHoveSpec& spec);

struct SolveSummary {
  double e0 = 0.0;
  double e_p0 = 0.0;
  double n_expect = 0.0;
  double residual = 0.0;
  double top_weight = 0.0;
  std::vector<double> occupations;
  std::size_t dimension = 0;
  std::size_t modes = 0;
};

SolveSummary solve_problem(const QuantumProblem& problem, const fock::EigenOptions& options,
                           fock::GroundState* keep = nullptr);

// Ground-state occupations summed over cos/sin partners and shells, per |p|,
// with power fits of their tail and of the coupling-norm tail.
struct OccupancyDecay {
  SolveSummary solve;
  std::vector<double> per_label;       // index |p|
  std::vector<double> coupling_norms;  // index |p|
  quad::DecayFit occupation_fit;
  quad::DecayFit coupling_fit;
};

OccupancyDecay occupancy_decay(const QuantumSetup& setup, int p_from = 1);
OccupancyDecay occupancy_decay(const QuantumProblem& problem, const fock::EigenOptions& options,
                               int p_from = 1);

// ---------------------------------------------------------------------------
// Sweeps

enum class SweepKind { sigma, support, truncation, classical_force };
std::string_view to_string(SweepKind kind);

struct SweepRow {
  double param = 0.0;
  double e0 = 0.0;
  double n_expect = 0.0;
  double residual = 0.0;
  double top_weight = 0.0;
  std::vector<std::string> flags;  // "unhealthy", "low_confidence", "variational", ...
  std::map<std::string, double> extra;

  bool healthy() const;
};

struct SweepResult {
  SweepKind kind = SweepKind::sigma;
  std::vector<std::string> extra_columns;
  std::vector<SweepRow> rows;
  // Derived fits and pass/fail facts, e.g. "n_monotone" -> 1.
  std::map<std::string, double> summary;
  std::vector<std::string> notes;
};

struct SweepIo {
  std::string csv_path;  // empty: no persistence
  bool resume = true;    // reuse rows already present in csv_path
  std::size_t threads = 0;  // 0 reads FRICTIONLAB_THREADS, default 1
};

// E_sigma, <N>_sigma against soft_boson_bound. Summary keys: variational,
// n_monotone, below_bound, log_r2, log_slope (n = 3), increments_decreasing (n >= 4).
SweepResult sweep_sigma(const QuantumSetup& setup, const std::vector<double>& sigmas,
                        const SweepIo& io = {});

// Couplings restricted to |p| <= M. Summary keys: monotone, plateau_ok,
// last_increment, predicted_increment.
SweepResult sweep_support(const QuantumSetup& setup, const std::vector<int>& labels,
                          const SweepIo& io = {});

// E_0(N_max) with the pullthrough residual of the most strongly coupled mode.
// With a Van Hove reference the error to the closed form is reported too.
// Summary keys: monotone, residual_decreasing, (reference_error).
SweepResult truncation_convergence(const QuantumSetup& setup, const std::vector<unsigned>& n_max,
                                   const SweepIo& io = {});
SweepResult truncation_convergence(const VanHoveSpec& spec, const std::vector<unsigned>& n_max,
                                   const SweepIo& io = {});

struct ForceSweepSpec {
  model::ModelConfig config;   // potential is replaced by the linear drive
  classical::RunParams run;    // q0, p0, grid, dt, duration, stride
  double fit_start = 0.5;      // fraction of the duration
  double fit_from = 0.5;       // time where the exponential fit starts
};

// Per force: v_inf, rate, asymptote, r2. Summary keys: gamma, exponent, exponent_r2,
// and for n = 3 ratio_min / ratio_max of v_inf gamma / F.
SweepResult classical_force_sweep(const ForceSweepSpec& spec, const std::vector<double>& forces,
                                  const SweepIo& io = {});
// Lattice extent that comfortably holds a driven run.
double driven_lattice_extent(const model::ModelConfig& config, double force, double duration,
                             double q0);

void write_csv(std::ostream& out, const SweepResult& result);
// Parses what write_csv produced (used to resume).
std::vector<SweepRow> read_csv(std::istream& in);

std::size_t thread_count(std::size_t requested = 0);

// ---------------------------------------------------------------------------
// Manifests

struct ManifestEntry {
  std::string path;
  std::string hash;  // fnv1a of the file bytes
};

struct Manifest {
  std::string command;
  std::string config_text;  // canonical
  std::string config_hash;
  std::string version;
  std::string started;
  std::string finished;
  std::vector<ManifestEntry> outputs;
};

std::string file_hash(const std::string& path);
std::string now_iso8601();
void write_manifest(const std::string& path, const Manifest& manifest);
Manifest read_manifest(const std::string& path);
// Problems found when re-deriving hashes; empty when consistent.
std::vector<std::string> check_manifest(const std::string& path);

}  // namespace frictionlab::experiments
