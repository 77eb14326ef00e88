#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "core/classical.hpp"
#include "core/fock.hpp"
#include "core/model.hpp"
#include "core/quadrature.hpp"

namespace frictionlab::config {

struct PotentialSpec {
  model::Potential::Kind kind = model::Potential::Kind::harmonic;
  double spring = 1.0;
  double quadratic = 0.0;
  double quartic = 1.0;
  std::array<double, 3> force{};
  std::array<double, 3> center{};

  model::Potential build() const;
};

struct ModelSection {
  int d = 1;
  int n = 3;
  double c = 10.0;
  double sigma = 0.0;
  double mass = 0.0;
  model::ProfileShape rho1_shape = model::ProfileShape::smooth_bump;
  double rho1_radius = 1.0;
  double rho1_amplitude = 1.0;
  bool rho1_zero_mean = false;
  model::ProfileShape rho2_shape = model::ProfileShape::smooth_bump;
  double rho2_radius = 1.0;
  double rho2_amplitude = 1.0;
  bool rho2_zero_mean = false;
  PotentialSpec potential;
};

enum class Drive { confining, force };

struct ClassicalSection {
  classical::GridParams grid;
  double duration = 20.0;
  double dt = 0.0;          // 0 selects 0.8 h_r / c
  double sample_dt = 0.05;  // time between samples
  double q0 = 0.0;
  double p0 = 0.0;
  Drive drive = Drive::confining;
  double force = 0.0;
  double fit_start = 0.5;   // fraction of T where the v_inf window begins
  double fit_from = 0.5;    // start of the exponential-approach fit (time)
};

struct QuantumSection {
  // Multiplies rho_1 in quantum builds; the default keeps N_max = 2 healthy.
  double coupling = 0.1;
  unsigned n_max = 2;
  std::size_t n_p = 3;
  model::GridSpec grid;
  quad::DiscretizationSpec modes;
  fock::EigenOptions eigen;
};

struct SweepSection {
  std::vector<double> sigma_grid{0.1, 0.05, 0.025, 0.0125, 0.00625, 0.003125};
  std::vector<double> support_grid{0, 1, 2, 3};
  std::vector<double> n_max_grid{1, 2, 3, 4};
  std::vector<double> force_grid{0.05, 0.1, 0.2};
};

struct Settings {
  ModelSection model;
  ClassicalSection classical;
  QuantumSection quantum;
  SweepSection sweep;

  // Profiles take the particle / membrane dimension from d and n.
  model::ModelConfig model_config() const;
};

// Sectioned key=value text. Several pairs may share a line ("[model] d=1 n=3"),
// '#' starts a comment, list values are comma separated. Unknown sections or
// keys and unparsable values throw ConfigError.
Settings parse(std::string_view text);
Settings load(const std::string& path);

void set(Settings& settings, std::string_view section, std::string_view key,
         std::string_view value);
std::string get(const Settings& settings, std::string_view section, std::string_view key);

// Every key in a fixed order with round-trip precision; parse(canonical(s)) == s.
std::string canonical(const Settings& settings);

std::uint64_t fnv1a(std::string_view bytes);
std::string hash_hex(std::uint64_t hash);
// fnv1a of the canonical text.
std::string config_hash(const Settings& settings);

struct KeyInfo {
  std::string section;
  std::string key;
};
std::vector<KeyInfo> known_keys();

}  // namespace frictionlab::config
