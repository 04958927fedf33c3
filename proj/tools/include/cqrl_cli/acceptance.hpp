#pragma once

#include <string>
#include <vector>

namespace cqrl::cli {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  std::vector<int> only;  // empty runs all eleven
  int threads = 1;
};

// Runs with the default tolerance table regardless of CQRL_TOL and restores
// the previous table afterwards.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt);
// One "[PASS]"/"[FAIL]" line per criterion followed by a summary line.
std::string format_table(const std::vector<CriterionResult>& results);

}  // namespace cqrl::cli
