// Runs the full verification suite and prints one line per criterion.
// Exit status 3 when any criterion fails.

#include <cstdio>
#include <cstdlib>

#include "tensorcue/acceptance.hpp"
#include "tensorcue/experiment.hpp"

int main() {
  tensorcue::AcceptanceOptions opts;
  opts.workers = tensorcue::default_worker_count();
  opts.on_result = [](const tensorcue::CriterionResult& r) {
    std::printf("%s\n", tensorcue::format_result_line(r).c_str());
    std::fflush(stdout);
  };
  const auto results = tensorcue::run_acceptance_suite(opts);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::printf("%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? EXIT_SUCCESS : 3;
}
