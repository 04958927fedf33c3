#include "cqrl/lp.hpp"

#include <algorithm>
#include <cmath>

#include "cqrl/errors.hpp"

namespace cqrl {

LpResult lp_feasible(int num_vars, const std::vector<LinearConstraint>& rows, double strict_margin,
                     double residual_tol) {
  using Sense = LinearConstraint::Sense;
  const int m = static_cast<int>(rows.size());
  int slack_count = 0;
  for (const auto& r : rows) {
    if (static_cast<int>(r.coeffs.size()) != num_vars) throw Error(ErrorKind::DimensionMismatch, "row width differs from variable count: " + r.label);
    if (r.sense != Sense::Equal) ++slack_count;
  }
  // Columns: [x (num_vars) | slacks | artificials (m) | rhs]
  const int ncol = num_vars + slack_count + m;
  std::vector<std::vector<double>> t(static_cast<size_t>(m) + 1, std::vector<double>(static_cast<size_t>(ncol) + 1, 0.0));
  std::vector<int> basis(static_cast<size_t>(m));
  int s = 0;
  for (int i = 0; i < m; ++i) {
    const auto& r = rows[static_cast<size_t>(i)];
    auto& row = t[static_cast<size_t>(i)];
    double b = r.rhs;
    if (r.sense == Sense::Less && r.strict) b -= strict_margin;
    if (r.sense == Sense::Greater && r.strict) b += strict_margin;
    for (int v = 0; v < num_vars; ++v) row[static_cast<size_t>(v)] = r.coeffs[static_cast<size_t>(v)];
    if (r.sense == Sense::Less) row[static_cast<size_t>(num_vars + s++)] = 1.0;
    else if (r.sense == Sense::Greater) row[static_cast<size_t>(num_vars + s++)] = -1.0;
    row[static_cast<size_t>(ncol)] = b;
    if (b < 0) for (auto& x : row) x = -x;
    row[static_cast<size_t>(num_vars + slack_count + i)] = 1.0;
    basis[static_cast<size_t>(i)] = num_vars + slack_count + i;
  }
  // Objective row holds reduced costs of min Σ artificials.
  auto& obj = t[static_cast<size_t>(m)];
  for (int i = 0; i < m; ++i)
    for (int c = 0; c <= ncol; ++c)
      if (c < num_vars + slack_count || c == ncol) obj[static_cast<size_t>(c)] -= t[static_cast<size_t>(i)][static_cast<size_t>(c)];

  const double eps = 1e-12;
  LpResult res;
  const int max_pivots = 50000;
  while (true) {
    int enter = -1;
    for (int c = 0; c < ncol; ++c)
      if (obj[static_cast<size_t>(c)] < -eps) { enter = c; break; }
    if (enter < 0) break;
    int leave = -1;
    double best = 0.0;
    for (int i = 0; i < m; ++i) {
      const double a = t[static_cast<size_t>(i)][static_cast<size_t>(enter)];
      if (a <= eps) continue;
      const double ratio = t[static_cast<size_t>(i)][static_cast<size_t>(ncol)] / a;
      if (leave < 0 || ratio < best - 1e-15 ||
          (std::abs(ratio - best) <= 1e-15 && basis[static_cast<size_t>(i)] < basis[static_cast<size_t>(leave)])) {
        leave = i;
        best = ratio;
      }
    }
    if (leave < 0) break;  // unbounded direction cannot occur in phase 1
    auto& prow = t[static_cast<size_t>(leave)];
    const double piv = prow[static_cast<size_t>(enter)];
    for (auto& x : prow) x /= piv;
    for (int i = 0; i <= m; ++i) {
      if (i == leave) continue;
      auto& row = t[static_cast<size_t>(i)];
      const double f = row[static_cast<size_t>(enter)];
      if (f == 0.0) continue;
      for (int c = 0; c <= ncol; ++c) row[static_cast<size_t>(c)] -= f * prow[static_cast<size_t>(c)];
    }
    basis[static_cast<size_t>(leave)] = enter;
    if (++res.pivots > max_pivots) throw Error(ErrorKind::NumericalFailure, "simplex pivot limit reached");
  }

  res.phase1_objective = -obj[static_cast<size_t>(ncol)];
  res.x.assign(static_cast<size_t>(num_vars), 0.0);
  for (int i = 0; i < m; ++i)
    if (basis[static_cast<size_t>(i)] < num_vars)
      res.x[static_cast<size_t>(basis[static_cast<size_t>(i)])] = std::max(0.0, t[static_cast<size_t>(i)][static_cast<size_t>(ncol)]);

  // Judge feasibility on the original rows rather than the tableau value.
  // Strict rows must keep half the margin; residual_tol would otherwise
  // swallow it whenever it exceeds the margin.
  bool ok = true;
  for (const auto& r : rows) {
    double lhs = 0.0;
    for (int v = 0; v < num_vars; ++v) lhs += r.coeffs[static_cast<size_t>(v)] * res.x[static_cast<size_t>(v)];
    double excess = 0.0;  // > 0 means violated
    if (r.sense == Sense::Less) excess = lhs - r.rhs;
    else if (r.sense == Sense::Greater) excess = r.rhs - lhs;
    else excess = std::abs(lhs - r.rhs);
    if (r.sense != Sense::Equal && r.strict) ok = ok && excess <= -0.5 * strict_margin;
    else ok = ok && excess <= residual_tol;
  }
  res.feasible = ok;
  return res;
}

}  // namespace cqrl
