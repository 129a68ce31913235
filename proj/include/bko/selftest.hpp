#pragma once

#include <functional>
#include <string>
#include <vector>

namespace bko {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0: no runtime limit

  std::string line() const;  // "[PASS] 3 title: detail (1.23 s)"
};

CriterionResult check_partition_of_unity();
CriterionResult check_golden_symbolic();
CriterionResult check_symbolic_numeric();
CriterionResult check_order_laws();
CriterionResult check_voronovskaja();
CriterionResult check_weighted_majorants();
CriterionResult check_statistical_density();
CriterionResult check_bv_estimate();
CriterionResult check_rate_fits();
CriterionResult check_bound_suite();

struct AcceptanceCriterion {
  int id;
  std::function<CriterionResult()> run;
};

const std::vector<AcceptanceCriterion>& acceptance_criteria();

// Runs the selected criteria (all when `ids` is empty), calling `sink` after
// each one. Criterion 10 also enforces the overall time budget.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& sink = {});

}  // namespace bko
