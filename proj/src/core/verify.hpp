#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace frictionlab::verify {

// Test fixtures for checking that the suite notices broken physics.
// coupling_sign negates the upper-triangle off-diagonal entries of every
// Hamiltonian the suite builds.
enum class Fault { none, coupling_sign };
Fault fault_from_string(std::string_view name);

struct CheckInfo {
  std::string name;
  std::string anchor;  // the claim being checked
};

struct CheckResult {
  CheckInfo info;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  Fault fault = Fault::none;
  std::vector<std::string> only;  // empty: every check
};

struct Report {
  std::vector<CheckResult> results;
  bool all_pass() const;
  std::vector<std::string> failing() const;
};

std::vector<CheckInfo> list_checks();
Report run(const Options& options = {});

}  // namespace frictionlab::verify
