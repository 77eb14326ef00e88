#include <doctest.h>

#include <string>

#include "core/config.hpp"
#include "core/error.hpp"

using namespace frictionlab;
using namespace frictionlab::config;

TEST_CASE("defaults and several pairs per line") {
  const auto s = parse("[model] d=1 n=4 c=7.5  # comment\n[quantum]\nn_max = 3\n");
  CHECK(s.model.d == 1);
  CHECK(s.model.n == 4);
  CHECK(s.model.c == 7.5);
  CHECK(s.quantum.n_max == 3);
  CHECK(s.classical.duration == 20.0);
  CHECK(s.model_config().rho2.dimension() == 4);
  CHECK(s.model_config().rho1.dimension() == 1);
}

TEST_CASE("lists") {
  const auto s = parse("[sweep] sigma_grid=0.1,0.05, 0.01 ,0.001\n");
  REQUIRE(s.sweep.sigma_grid.size() == 4);
  CHECK(s.sweep.sigma_grid[3] == 0.001);
}

TEST_CASE("canonical text round-trips exactly") {
  Settings s;
  set(s, "model", "c", "3.3000000000000003");
  set(s, "model", "rho1_shape", "polynomial_bump");
  set(s, "model", "potential", "quartic");
  set(s, "classical", "drive", "force");
  set(s, "classical", "force", "0.1");
  set(s, "quantum", "coupling", "0.25");
  const std::string text = canonical(s);
  const auto back = parse(text);
  CHECK(canonical(back) == text);
  CHECK(config_hash(back) == config_hash(s));
  CHECK(get(back, "model", "c") == get(s, "model", "c"));
  CHECK(back.model.c == s.model.c);
  // Every known key appears in the canonical form.
  for (const auto& k : known_keys()) CHECK(text.find(k.key + "=") != std::string::npos);
}

TEST_CASE("hash changes with content") {
  Settings a, b;
  set(b, "model", "n", "5");
  CHECK(config_hash(a) != config_hash(b));
  CHECK(hash_hex(fnv1a("")) == "cbf29ce484222325");
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(parse("[model] bogus=1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[nowhere] d=1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[model] n=three\n"), ConfigError);
  CHECK_THROWS_AS(parse("d=1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[classical] drive=sideways\n"), ConfigError);
  try {
    parse("[model]\n\nc=oops\n");
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  Settings s;
  CHECK_THROWS_AS(set(s, "model", "nope", "1"), ConfigError);
}
