#pragma once

#include <string>
#include <vector>

namespace blgi::cli {

struct CheckResult {
  std::string name;
  /// Worst observed deviation.
  double deviation;
  double tolerance;
  bool pass;
};

/// Oracle cross-checks: Kraus completeness, closed form vs joint-distribution
/// correlator, threshold identity, Bell correlations, no-signaling, the
/// unread-measurement channel, the classical bound, and SIMD equivalence.
std::vector<CheckResult> run_verification();

}  // namespace blgi::cli
