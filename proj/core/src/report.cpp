#include <cmath>
#include <iomanip>
#include <sstream>

#include "cqrl/regions.hpp"
#include "cqrl/tolerances.hpp"

namespace cqrl::regions {

namespace detail {

Inequality less(std::string label, double lhs, double rhs, bool strict) {
  return {std::move(label), lhs, rhs, rhs - lhs, strict};
}

Inequality greater(std::string label, double lhs, double rhs, bool strict) {
  return {std::move(label), lhs, rhs, lhs - rhs, strict};
}

bool verdict(const std::vector<Inequality>& recs) {
  const auto& tol = tolerances();
  for (const auto& r : recs) {
    if (r.strict) {
      if (!(r.slack > tol.rate)) return false;
    } else if (r.label.rfind("eq.", 0) == 0) {
      if (!(r.slack >= -tol.lp_residual)) return false;
    } else if (!(r.slack >= -tol.prob)) {
      return false;
    }
  }
  return true;
}

void add_costs(std::vector<Inequality>& recs, const CostVector& used, const CostVector& tau) {
  for (int j = 0; j < 3; ++j) {
    if (!std::isfinite(tau[static_cast<size_t>(j)])) continue;
    recs.push_back(less("cost." + std::to_string(j + 1), used[static_cast<size_t>(j)], tau[static_cast<size_t>(j)], false));
  }
}

}  // namespace detail

void to_json(nlohmann::json& j, const RegionReport& r) {
  j = nlohmann::json{{"system", r.system}, {"rates", r.rates}, {"feasible", r.feasible}};
  auto recs = nlohmann::json::array();
  for (const auto& q : r.records)
    recs.push_back({{"label", q.label}, {"lhs", q.lhs}, {"rhs", q.rhs}, {"slack", q.slack}, {"strict", q.strict}});
  j["records"] = std::move(recs);
  if (r.witness) j["witness"] = r.witness->values;
  else j["witness"] = nullptr;
}

std::string to_csv(const RegionReport& r) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "label,lhs,rhs,slack,strict\n";
  for (const auto& q : r.records) os << q.label << ',' << q.lhs << ',' << q.rhs << ',' << q.slack << ',' << (q.strict ? 1 : 0) << '\n';
  return os.str();
}

}  // namespace cqrl::regions
