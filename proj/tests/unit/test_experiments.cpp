#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "core/experiments.hpp"

using namespace frictionlab;
using namespace frictionlab::experiments;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "frictionlab_unit";
  std::filesystem::create_directories(dir);
  auto p = dir / name;
  std::filesystem::remove(p);
  return p;
}

QuantumSetup small() {
  QuantumSetup s;
  s.config.rho1 = s.config.rho1.scaled(0.2);
  s.modes.max_label = 3;
  s.modes.shells = 2;
  return s;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("zero coupling solve reproduces the bare particle") {
  auto s = small();
  s.config.rho1 = s.config.rho1.scaled(0.0);
  const auto p = build_problem(s);
  const auto r = solve_problem(p, {});
  CHECK(r.e0 == doctest::Approx(p.e_p0).epsilon(1e-12));
  CHECK(r.n_expect < 1e-20);
}

TEST_CASE("CSV write and read") {
  SweepResult r;
  r.extra_columns = {"x"};
  SweepRow a;
  a.param = 0.1;
  a.e0 = 0.7;
  a.n_expect = 1e-4;
  a.flags = {"unhealthy", "variational"};
  a.extra["x"] = 3.0;
  SweepRow b = a;
  b.param = 0.05;
  b.flags.clear();
  b.extra.clear();
  r.rows = {a, b};
  std::stringstream ss;
  write_csv(ss, r);
  const auto back = read_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[0].param == 0.1);
  CHECK(back[0].flags.size() == 2);
  CHECK(!back[0].healthy());
  CHECK(back[0].extra.at("x") == 3.0);
  CHECK(back[1].healthy());
  CHECK(std::isnan(back[1].extra.at("x")));
}

TEST_CASE("support sweep persists and resumes rows") {
  const auto path = scratch("support.csv");
  SweepIo io;
  io.csv_path = path.string();
  const auto first = sweep_support(small(), {0, 1, 2, 3}, io);
  const std::string text = slurp(path);
  // Second pass computes nothing and rewrites the same bytes.
  const auto second = sweep_support(small(), {0, 1, 2, 3}, io);
  CHECK(slurp(path) == text);
  CHECK(!second.notes.empty());
  for (std::size_t i = 0; i < 4; ++i) CHECK(second.rows[i].e0 == first.rows[i].e0);
  CHECK(first.summary.at("monotone") == 1.0);

  // A torn trailing line (interrupted run) is ignored and recomputed.
  {
    std::ofstream out(path, std::ios::trunc);
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    out << line << '\n';
    std::getline(lines, line);
    out << line << '\n';
    out << "2,0.70";
  }
  const auto third = sweep_support(small(), {0, 1, 2, 3}, io);
  CHECK(slurp(path) == text);
  CHECK(third.rows[2].e0 == first.rows[2].e0);
}

TEST_CASE("thread count does not change the results") {
  SweepIo one, two;
  one.threads = 1;
  two.threads = 2;
  const auto a = sweep_support(small(), {0, 1, 2, 3}, one);
  const auto b = sweep_support(small(), {0, 1, 2, 3}, two);
  std::stringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("sigma sweep needs a decreasing grid") {
  CHECK_THROWS(sweep_sigma(small(), {0.1, 0.2, 0.05, 0.01}));
  CHECK_THROWS(sweep_sigma(small(), {0.1, 0.05}));
}

TEST_CASE("manifest detects tampering") {
  const auto data = scratch("data.csv");
  const auto manifest = scratch("run.manifest.json");
  {
    std::ofstream out(data);
    out << "a,b\n1,2\n";
  }
  config::Settings s;
  Manifest m;
  m.command = "test";
  m.config_text = config::canonical(s);
  m.config_hash = config::config_hash(s);
  m.version = "0";
  m.started = m.finished = now_iso8601();
  m.outputs.push_back({"data.csv", file_hash(data.string())});
  write_manifest(manifest.string(), m);
  CHECK(check_manifest(manifest.string()).empty());
  const auto back = read_manifest(manifest.string());
  CHECK(back.config_hash == m.config_hash);
  CHECK(back.outputs.size() == 1);
  {
    std::ofstream out(data, std::ios::app);
    out << "3,4\n";
  }
  CHECK(check_manifest(manifest.string()).size() == 1);
  std::filesystem::remove(data);
  CHECK(check_manifest(manifest.string()).size() == 1);
}

TEST_CASE("lattice extent covers the expected travel") {
  model::ModelConfig cfg;
  cfg.potential = model::Potential::linear({0.1, 0, 0});
  const double gamma = quad::friction_coefficient(cfg).gamma;
  const double ext = driven_lattice_extent(cfg, 0.1, 5.0, 0.0);
  // Capped by the wave speed: q(T) <= c T.
  CHECK(ext <= 1.5 * cfg.c * 5.0 + 2.0 * cfg.rho1.radius() + 1.0 + 1e-12);
  CHECK(ext > 0.0);
  (void)gamma;
}
