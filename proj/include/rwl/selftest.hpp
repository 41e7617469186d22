#pragma once

#include <string>
#include <vector>

namespace rwl {

/// Outcome of one acceptance criterion.
struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Measured values against their thresholds.
  std::string detail;
  double seconds = 0.0;

  /// "PASS 3 propagator vs ODE oracle: ... (1.2 s)"
  std::string line() const;
};

/// Criteria 1-9 in order.
std::vector<int> acceptance_ids();

/// Runs one criterion; exceptions are reported as a failure, never thrown.
/// `threads` bounds the worker count of the heavier criteria.
CriterionResult run_criterion(int id, int threads = 1);

}  // namespace rwl
