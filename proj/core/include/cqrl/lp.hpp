#pragma once

#include <string>
#include <vector>

namespace cqrl {

// One row a·x (<, >, =) b over nonnegative variables x.
struct LinearConstraint {
  enum class Sense { Less, Greater, Equal };
  std::string label;
  std::vector<double> coeffs;
  Sense sense = Sense::Less;
  double rhs = 0.0;
  bool strict = true;  // ignored for Equal
};

struct LpResult {
  bool feasible = false;
  std::vector<double> x;
  double phase1_objective = 0.0;
  int pivots = 0;
};

// Phase-1 simplex (dense tableau, Bland's rule). Strict rows are tightened by
// `strict_margin` before solving. Feasible means x keeps strict rows at least
// strict_margin/2 inside and the rest within `residual_tol`.
LpResult lp_feasible(int num_vars, const std::vector<LinearConstraint>& rows, double strict_margin,
                     double residual_tol);

}  // namespace cqrl
