#include <algorithm>
#include <cmath>

#include "cqrl/errors.hpp"
#include "cqrl/gf.hpp"
#include "cqrl/regions.hpp"
#include "cqrl/tolerances.hpp"

namespace cqrl::regions {

namespace {

void validate(const ChannelSpec& ch, const Thm1Config& cfg) {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::ConfigMismatch, m); };
  if (!gf::is_supported_prime(cfg.field)) bad("field size must be a supported prime");
  if (cfg.p_x1.size() != ch.inputs()[0]) bad("p_X1 size differs from |X1|");
  if (cfg.p_u2.size() != cfg.field || cfg.p_u3.size() != cfg.field) bad("p_Uj must live on the field");
  if (static_cast<int>(cfg.f2.size()) != cfg.field || static_cast<int>(cfg.f3.size()) != cfg.field) bad("maps f_j must be total on the field");
  for (int u = 0; u < cfg.field; ++u) {
    if (cfg.f2[static_cast<size_t>(u)] < 0 || cfg.f2[static_cast<size_t>(u)] >= ch.inputs()[1]) bad("f2 leaves X2");
    if (cfg.f3[static_cast<size_t>(u)] < 0 || cfg.f3[static_cast<size_t>(u)] >= ch.inputs()[2]) bad("f3 leaves X3");
  }
}

const EntropyQuery kY{{}, true};

}  // namespace

Thm1Bounds thm1_bounds(const ChannelSpec& ch, const Thm1Config& cfg) {
  validate(ch, cfg);
  const int v = cfg.field;
  std::array<CqState, 3> st = {
      CqState({{"X1", ch.inputs()[0]}, {"U2", v}, {"U3", v}, {"U", v}}, ch.output_dims()[0]),
      CqState({{"X1", ch.inputs()[0]}, {"U2", v}, {"U3", v}, {"U", v}}, ch.output_dims()[1]),
      CqState({{"X1", ch.inputs()[0]}, {"U2", v}, {"U3", v}, {"U", v}}, ch.output_dims()[2])};
  for (int r = 0; r < 3; ++r) {
    std::vector<int> op(static_cast<size_t>(ch.input_count()), -1);
    for (int x1 = 0; x1 < ch.inputs()[0]; ++x1)
      for (int u2 = 0; u2 < v; ++u2)
        for (int u3 = 0; u3 < v; ++u3) {
          const double p = cfg.p_x1[x1] * cfg.p_u2[u2] * cfg.p_u3[u3];
          if (p <= 0) continue;
          const int x2 = cfg.f2[static_cast<size_t>(u2)], x3 = cfg.f3[static_cast<size_t>(u3)];
          const int flat = ch.flat_index(x1, x2, x3);
          auto& idx = op[static_cast<size_t>(flat)];
          if (idx < 0) idx = st[static_cast<size_t>(r)].add_operator_unchecked(ch.marginal(r, x1, x2, x3));
          st[static_cast<size_t>(r)].add_point({x1, u2, u3, (u2 + u3) % v}, p, idx);
        }
  }
  const auto& s1 = st[0];
  Thm1Bounds b;
  const double hu = s1.entropy({{"U"}, false});
  const double hmin = std::min(s1.entropy({{"U2"}, false}), s1.entropy({{"U3"}, false}));
  b.r1 = conditional_mutual_info(s1, {{"X1"}, false}, kY, {{"U"}, false});
  b.r2 = mutual_info(st[1], {{"U2"}, false}, kY);
  b.r3 = mutual_info(st[2], {{"U3"}, false}, kY);
  b.sum_coset = conditional_mutual_info(s1, {{"U"}, false}, kY, {{"X1"}, false}) - hu + hmin;
  b.pair = mutual_info(s1, {{"U", "X1"}, false}, kY) - hu + hmin;
  const auto& k = ch.costs();
  for (int x = 0; x < ch.inputs()[0]; ++x) b.cost[0] += cfg.p_x1[x] * k[0][static_cast<size_t>(x)];
  for (int u = 0; u < v; ++u) {
    b.cost[1] += cfg.p_u2[u] * k[1][static_cast<size_t>(cfg.f2[static_cast<size_t>(u)])];
    b.cost[2] += cfg.p_u3[u] * k[2][static_cast<size_t>(cfg.f3[static_cast<size_t>(u)])];
  }
  return b;
}

RegionReport thm1_check(const ChannelSpec& ch, const Thm1Config& cfg, const Rates& rates, const CostVector& tau) {
  const auto b = thm1_bounds(ch, cfg);
  RegionReport rep;
  rep.system = "thm1";
  rep.rates = rates;
  using detail::less;
  auto& r = rep.records;
  r.push_back(less("thm1.R1", rates[0], b.r1));
  r.push_back(less("thm1.R2", rates[1], b.r2));
  r.push_back(less("thm1.R3", rates[2], b.r3));
  r.push_back(less("thm1.R2.sum-coset", rates[1], b.sum_coset));
  r.push_back(less("thm1.R3.sum-coset", rates[2], b.sum_coset));
  r.push_back(less("thm1.R1+R2", rates[0] + rates[1], b.pair));
  r.push_back(less("thm1.R1+R3", rates[0] + rates[2], b.pair));
  detail::add_costs(r, b.cost, tau);
  rep.feasible = detail::verdict(r);
  return rep;
}

RegionReport thm1_check(const ChannelSpec& ch, const Thm1Config& cfg, const Rates& rates) {
  return thm1_check(ch, cfg, rates, ch.tau());
}

std::optional<double> thm1_r1_sup(const ChannelSpec& ch, const Thm1Config& cfg, double r2, double r3) {
  const auto b = thm1_bounds(ch, cfg);
  const auto& tol = tolerances();
  const auto& tau = ch.tau();
  for (int j = 0; j < 3; ++j)
    if (b.cost[static_cast<size_t>(j)] > tau[static_cast<size_t>(j)] + tol.prob) return std::nullopt;
  if (!(b.r2 - r2 > tol.rate && b.r3 - r3 > tol.rate && b.sum_coset - r2 > tol.rate && b.sum_coset - r3 > tol.rate))
    return std::nullopt;
  const double sup = std::min({b.r1, b.pair - r2, b.pair - r3});
  if (!(sup > tol.rate)) return std::nullopt;
  return sup;
}

}  // namespace cqrl::regions
