#pragma once

// Acceptance criteria 1..10 as runnable checks. Each check times itself and reports the
// measured quantities in `detail`; runtime limits are part of the pass condition where a
// criterion states one.

#include <string>
#include <vector>

#include <json.hpp>

namespace lagexp {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

void to_json(nlohmann::json& j, const CriterionResult& r);

/// Runs criterion `id` (1..10). Exceptions from the modules are caught and reported as a
/// failure with the message as detail. Throws DomainError for an unknown id.
CriterionResult run_criterion(int id);

/// Runs the given criteria in order (all ten when empty).
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {});

/// "[PASS] 4 cross-oracle uniqueness (51.2 s): distance ... "
std::string format_result(const CriterionResult& r);

}  // namespace lagexp
