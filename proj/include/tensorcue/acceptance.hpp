#pragma once

// The end-to-end verification suite. Every tolerance below is fixed; the
// suite has no calibration knobs besides the worker count.

#include <functional>
#include <string>
#include <vector>

namespace tensorcue {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct AcceptanceOptions {
  int workers = 1;
  // Restrict to these criterion ids; empty runs all of them.
  std::vector<int> only;
  // Called as each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_acceptance_suite(const AcceptanceOptions& opts = {});

std::string format_result_line(const CriterionResult& r);

}  // namespace tensorcue
