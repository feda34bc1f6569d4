#pragma once

#include "artifacts.hpp"
#include "config.hpp"

#include "fracheat/audit.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fracheat::cli {

const std::vector<std::string>& command_names();

/// Runs a single-pass command and returns its artifacts.  Every command
/// except audit-all goes through here.
Artifacts run_command(const std::string& command, const RunConfig& config);

struct AuditOutcome {
  std::vector<audit::CriterionResult> results;  ///< criteria 1..14 and the determinism check
  Artifacts summary;                            ///< one row per criterion
  Artifacts metrics;                            ///< one row per metric
  bool all_passed = false;
};

/// Runs the suite twice, writes both metric artifact sets and compares them
/// byte for byte; the comparison is criterion 15.  Writes
/// audit-all-<hash>.{csv,json} and audit-metrics-<hash>.{csv,json} to the
/// config's output directory.
AuditOutcome audit_all(const RunConfig& config,
                       const std::function<void(const audit::CriterionResult&)>& on_result = {});

}  // namespace fracheat::cli
