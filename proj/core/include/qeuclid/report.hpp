#pragma once

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace qeuclid {

// One verification outcome. `residual` is empty on pass; on failure it holds a
// deterministic witness in canonical text (usually the first nonzero residual,
// labeled with the indices and radical sector it lives in).
struct CheckResult {
  std::string id;
  bool pass = false;
  std::string residual;
  double timing_ms = 0.0;
};

// An ordered list of checks; construction order is the report order, so every
// verifier emits its entries deterministically.
struct VerificationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }

  void add(std::string id, bool pass, std::string residual = {}) {
    checks.push_back({std::move(id), pass, std::move(residual), 0.0});
  }

  void add_timed(std::string id, bool pass, std::string residual,
                 std::chrono::steady_clock::time_point start) {
    const auto stop = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(stop - start).count();
    checks.push_back({std::move(id), pass, std::move(residual), ms});
  }

  void merge(VerificationReport other) {
    for (auto& c : other.checks) checks.push_back(std::move(c));
  }

  const CheckResult* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

}  // namespace qeuclid
