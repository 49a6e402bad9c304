#pragma once

#include <filesystem>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace aerostar::acceptance {

struct CheckResult {
  bool pass = false;
  std::string detail;
};

struct Check {
  int id = 0;
  std::string title;
  std::function<CheckResult(const std::filesystem::path& scratch)> run;
};

// Physics, fairness, numerical and overfit checks (everything but the
// learning comparison).
std::vector<Check> fast_checks();
// Multi-seed learning comparison against the random policy.
std::vector<Check> learning_checks();

// Prints one "PASS|FAIL [id] title: detail" line per check; returns the
// number of failures. Exceptions count as failures.
int run_checks(const std::vector<Check>& checks, const std::filesystem::path& scratch, std::ostream& out);

}  // namespace aerostar::acceptance
