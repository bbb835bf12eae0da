#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nltv {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Closed-form, oracle and property checks sized to finish in seconds.
/// Randomized checks draw from `seed`.
std::vector<CheckResult> run_self_checks(std::uint64_t seed = 0);

}  // namespace nltv
