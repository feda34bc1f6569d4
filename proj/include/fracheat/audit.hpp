#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fracheat::audit {

struct Metric {
  std::string name;
  double value = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;          ///< one line, deterministic
  std::vector<Metric> metrics;  ///< deterministic numbers behind the verdict
  double seconds = 0.0;         ///< wall time; not part of any artifact
};

struct Options {
  std::uint64_t seed = 20240601;
  int threads = 1;
  std::vector<int> only;  ///< empty: every criterion
  std::function<void(const CriterionResult&)> on_result;
};

/// Ids of the numerical criteria, in run order.
std::vector<int> criterion_ids();
std::string criterion_name(int id);

/// Runs one criterion.  Exceptions inside a criterion become a failed result
/// whose summary carries the message.
CriterionResult run_criterion(int id, const Options& options);

std::vector<CriterionResult> run_all(const Options& options);

}  // namespace fracheat::audit
