#include "core/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "core/error.hpp"

namespace frictionlab::config {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
  std::ostringstream msg;
  msg << "config key '" << key << "': cannot read '" << value << "' as " << what;
  throw ConfigError(msg.str());
}

double to_double(std::string_view key, std::string_view s) {
  s = trim(s);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_value(key, s, "a number");
  return v;
}

long to_long(std::string_view key, std::string_view s) {
  s = trim(s);
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) bad_value(key, s, "an integer");
  return v;
}

std::size_t to_count(std::string_view key, std::string_view s) {
  const long v = to_long(key, s);
  if (v < 0) bad_value(key, s, "a non-negative integer");
  return static_cast<std::size_t>(v);
}

bool to_bool(std::string_view key, std::string_view s) {
  s = trim(s);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  bad_value(key, s, "a boolean");
}

std::vector<double> to_list(std::string_view key, std::string_view s) {
  std::vector<double> out;
  s = trim(s);
  if (s.empty()) return out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = s.find(',', pos);
    const std::size_t end = comma == std::string_view::npos ? s.size() : comma;
    out.push_back(to_double(key, s.substr(pos, end - pos)));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

std::vector<double> to_vector3(std::string_view key, std::string_view s) {
  auto v = to_list(key, s);
  if (v.empty() || v.size() > 3) bad_value(key, s, "1 to 3 comma-separated numbers");
  v.resize(3, 0.0);
  return v;
}

std::string list_text(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += format_double(v[i]);
  }
  return out;
}

std::string vector3_text(const std::array<double, 3>& v) {
  return list_text({v.begin(), v.end()});
}

model::Potential::Kind potential_kind(std::string_view key, std::string_view s) {
  s = trim(s);
  if (s == "harmonic") return model::Potential::Kind::harmonic;
  if (s == "quartic") return model::Potential::Kind::quartic;
  if (s == "linear") return model::Potential::Kind::linear;
  bad_value(key, s, "harmonic|quartic|linear");
}

model::ProfileShape shape(std::string_view key, std::string_view s) {
  try {
    return model::profile_shape_from_string(trim(s));
  } catch (const Error&) {
    bad_value(key, s, "smooth_bump|polynomial_bump");
  }
}

struct Key {
  const char* section;
  const char* name;
  std::function<void(Settings&, std::string_view)> set;
  std::function<std::string(const Settings&)> get;
};

#define FL_DOUBLE(sec, nm, field)                                                   \
  Key{sec, nm, [](Settings& s, std::string_view v) { s.field = to_double(nm, v); }, \
      [](const Settings& s) { return format_double(s.field); }}
#define FL_INT(sec, nm, field, type)                                                 \
  Key{sec, nm,                                                                       \
      [](Settings& s, std::string_view v) { s.field = static_cast<type>(to_long(nm, v)); }, \
      [](const Settings& s) { return std::to_string(s.field); }}
#define FL_COUNT(sec, nm, field, type)                                               \
  Key{sec, nm,                                                                       \
      [](Settings& s, std::string_view v) { s.field = static_cast<type>(to_count(nm, v)); }, \
      [](const Settings& s) { return std::to_string(s.field); }}
#define FL_BOOL(sec, nm, field)                                                    \
  Key{sec, nm, [](Settings& s, std::string_view v) { s.field = to_bool(nm, v); }, \
      [](const Settings& s) { return std::string(s.field ? "true" : "false"); }}
#define FL_SHAPE(sec, nm, field)                                                 \
  Key{sec, nm, [](Settings& s, std::string_view v) { s.field = shape(nm, v); }, \
      [](const Settings& s) { return std::string(model::to_string(s.field)); }}
#define FL_LIST(sec, nm, field)                                                    \
  Key{sec, nm, [](Settings& s, std::string_view v) { s.field = to_list(nm, v); }, \
      [](const Settings& s) { return list_text(s.field); }}
#define FL_VEC3(sec, nm, field)                                                    \
  Key{sec, nm,                                                                     \
      [](Settings& s, std::string_view v) {                                        \
        auto x = to_vector3(nm, v);                                                \
        s.field = {x[0], x[1], x[2]};                                              \
      },                                                                           \
      [](const Settings& s) { return vector3_text(s.field); }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      FL_INT("model", "d", model.d, int),
      FL_INT("model", "n", model.n, int),
      FL_DOUBLE("model", "c", model.c),
      FL_DOUBLE("model", "sigma", model.sigma),
      FL_DOUBLE("model", "mass", model.mass),
      FL_SHAPE("model", "rho1_shape", model.rho1_shape),
      FL_DOUBLE("model", "rho1_radius", model.rho1_radius),
      FL_DOUBLE("model", "rho1_amplitude", model.rho1_amplitude),
      FL_BOOL("model", "rho1_zero_mean", model.rho1_zero_mean),
      FL_SHAPE("model", "rho2_shape", model.rho2_shape),
      FL_DOUBLE("model", "rho2_radius", model.rho2_radius),
      FL_DOUBLE("model", "rho2_amplitude", model.rho2_amplitude),
      FL_BOOL("model", "rho2_zero_mean", model.rho2_zero_mean),
      Key{"model", "potential",
          [](Settings& s, std::string_view v) { s.model.potential.kind = potential_kind("potential", v); },
          [](const Settings& s) { return std::string(model::to_string(s.model.potential.kind)); }},
      FL_DOUBLE("model", "spring", model.potential.spring),
      FL_DOUBLE("model", "quadratic", model.potential.quadratic),
      FL_DOUBLE("model", "quartic", model.potential.quartic),
      FL_VEC3("model", "force", model.potential.force),
      FL_VEC3("model", "center", model.potential.center),

      FL_DOUBLE("classical", "h_x", classical.grid.h_x),
      FL_DOUBLE("classical", "h_r", classical.grid.h_r),
      FL_DOUBLE("classical", "r_max", classical.grid.r_max),
      FL_DOUBLE("classical", "x_lo", classical.grid.x_lo),
      FL_DOUBLE("classical", "x_hi", classical.grid.x_hi),
      FL_BOOL("classical", "absorbing", classical.grid.absorbing),
      FL_DOUBLE("classical", "T", classical.duration),
      FL_DOUBLE("classical", "dt", classical.dt),
      FL_DOUBLE("classical", "sample_dt", classical.sample_dt),
      FL_DOUBLE("classical", "q0", classical.q0),
      FL_DOUBLE("classical", "p0", classical.p0),
      Key{"classical", "drive",
          [](Settings& s, std::string_view v) {
            v = trim(v);
            if (v == "confining") s.classical.drive = Drive::confining;
            else if (v == "force") s.classical.drive = Drive::force;
            else bad_value("drive", v, "confining|force");
          },
          [](const Settings& s) {
            return std::string(s.classical.drive == Drive::force ? "force" : "confining");
          }},
      FL_DOUBLE("classical", "force", classical.force),
      FL_DOUBLE("classical", "fit_start", classical.fit_start),
      FL_DOUBLE("classical", "fit_from", classical.fit_from),

      FL_DOUBLE("quantum", "coupling", quantum.coupling),
      FL_COUNT("quantum", "n_max", quantum.n_max, unsigned),
      FL_COUNT("quantum", "n_p", quantum.n_p, std::size_t),
      FL_DOUBLE("quantum", "half_width", quantum.grid.half_width),
      FL_DOUBLE("quantum", "spacing", quantum.grid.spacing),
      FL_DOUBLE("quantum", "box", quantum.modes.box),
      FL_INT("quantum", "p_max", quantum.modes.max_label, int),
      FL_COUNT("quantum", "shells", quantum.modes.shells, std::size_t),
      FL_DOUBLE("quantum", "k_max", quantum.modes.k_max),
      FL_DOUBLE("quantum", "omega_min", quantum.modes.omega_min),
      FL_DOUBLE("quantum", "eig_tol", quantum.eigen.tol),
      FL_COUNT("quantum", "krylov", quantum.eigen.krylov, std::size_t),
      FL_COUNT("quantum", "max_restarts", quantum.eigen.max_restarts, std::size_t),
      FL_COUNT("quantum", "seed", quantum.eigen.seed, std::uint64_t),

      FL_LIST("sweep", "sigma_grid", sweep.sigma_grid),
      FL_LIST("sweep", "support_grid", sweep.support_grid),
      FL_LIST("sweep", "n_max_grid", sweep.n_max_grid),
      FL_LIST("sweep", "force_grid", sweep.force_grid),
  };
  return table;
}

#undef FL_DOUBLE
#undef FL_INT
#undef FL_COUNT
#undef FL_BOOL
#undef FL_SHAPE
#undef FL_LIST
#undef FL_VEC3

bool known_section(std::string_view section) {
  for (const auto& k : keys()) {
    if (section == k.section) return true;
  }
  return false;
}

const Key& find(std::string_view section, std::string_view key) {
  bool section_known = false;
  for (const auto& k : keys()) {
    if (section == k.section) {
      section_known = true;
      if (key == k.name) return k;
    }
  }
  std::ostringstream msg;
  if (!section_known) msg << "unknown config section [" << section << "]";
  else msg << "unknown config key '" << key << "' in [" << section << "]";
  throw ConfigError(msg.str());
}

}  // namespace

model::Potential PotentialSpec::build() const {
  switch (kind) {
    case model::Potential::Kind::harmonic: return model::Potential::harmonic(spring, center);
    case model::Potential::Kind::quartic: return model::Potential::quartic(quadratic, quartic);
    case model::Potential::Kind::linear: return model::Potential::linear(force);
  }
  return model::Potential::harmonic(spring, center);
}

model::ModelConfig Settings::model_config() const {
  model::ModelConfig cfg;
  cfg.d = model.d;
  cfg.n = model.n;
  cfg.c = model.c;
  cfg.sigma = model.sigma;
  cfg.dispersion.mass = model.mass;
  cfg.rho1 = model::RadialProfile(model.rho1_shape, model.rho1_radius, model.rho1_amplitude,
                                  model.rho1_zero_mean, model.d);
  cfg.rho2 = model::RadialProfile(model.rho2_shape, model.rho2_radius, model.rho2_amplitude,
                                  model.rho2_zero_mean, model.n);
  cfg.potential = model.potential.build();
  return cfg;
}

void set(Settings& settings, std::string_view section, std::string_view key,
         std::string_view value) {
  find(section, key).set(settings, value);
}

std::string get(const Settings& settings, std::string_view section, std::string_view key) {
  return find(section, key).get(settings);
}

Settings parse(std::string_view text) {
  Settings settings;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    // Blanks around '=' and ',' are layout, not token separators.
    std::string squeezed;
    for (char ch : trim(line)) {
      if ((ch == '=' || ch == ',') && !squeezed.empty()) {
        while (!squeezed.empty() && (squeezed.back() == ' ' || squeezed.back() == '\t')) squeezed.pop_back();
      } else if ((ch == ' ' || ch == '\t') && !squeezed.empty() &&
                 (squeezed.back() == '=' || squeezed.back() == ',')) {
        continue;
      }
      squeezed += ch;
    }
    line = squeezed;
    try {
      while (!line.empty()) {
        if (line.front() == '[') {
          const auto close = line.find(']');
          if (close == std::string_view::npos) throw ConfigError("unterminated section header");
          section = std::string(trim(line.substr(1, close - 1)));
          if (!known_section(section)) throw ConfigError("unknown config section [" + section + "]");
          line = trim(line.substr(close + 1));
          continue;
        }
        std::size_t end = line.find_first_of(" \t");
        std::string_view token = line.substr(0, end);
        line = end == std::string_view::npos ? std::string_view{} : trim(line.substr(end));
        const auto eq = token.find('=');
        if (eq == std::string_view::npos || eq == 0) {
          throw ConfigError("expected key=value, got '" + std::string(token) + "'");
        }
        if (section.empty()) throw ConfigError("key outside of a [section]");
        set(settings, section, token.substr(0, eq), token.substr(eq + 1));
      }
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return settings;
}

Settings load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::string canonical(const Settings& settings) {
  std::string out;
  std::string section;
  for (const auto& k : keys()) {
    if (section != k.section) {
      section = k.section;
      out += "[" + section + "]\n";
    }
    out += std::string(k.name) + "=" + k.get(settings) + "\n";
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string config_hash(const Settings& settings) { return hash_hex(fnv1a(canonical(settings))); }

std::vector<KeyInfo> known_keys() {
  std::vector<KeyInfo> out;
  for (const auto& k : keys()) out.push_back({k.section, k.name});
  return out;
}

}  // namespace frictionlab::config
