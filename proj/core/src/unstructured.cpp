#include <algorithm>

#include "cqrl/errors.hpp"
#include "cqrl/linalg.hpp"
#include "cqrl/regions.hpp"
#include "cqrl/tolerances.hpp"

namespace cqrl::regions {

namespace {

const EntropyQuery kY{{}, true};

void validate(const ChannelSpec& ch, const UnstructuredPmf& p) {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::ConfigMismatch, m); };
  if (p.p_x1.size() != ch.inputs()[0]) bad("p_X1 size differs from |X1|");
  if (p.u2 < 1 || p.u3 < 1) bad("auxiliary alphabets must be nonempty");
  if (static_cast<int>(p.p_u2x2.size()) != p.u2 * ch.inputs()[1]) bad("p_U2X2 size differs from |U2||X2|");
  if (static_cast<int>(p.p_u3x3.size()) != p.u3 * ch.inputs()[2]) bad("p_U3X3 size differs from |U3||X3|");
  (void)Pmf(p.p_u2x2);
  (void)Pmf(p.p_u3x3);
}

}  // namespace

void require_3to1(const ChannelSpec& ch) {
  const double tol = tolerances().herm;
  for (int x1 = 0; x1 < ch.inputs()[0]; ++x1)
    for (int x2 = 0; x2 < ch.inputs()[1]; ++x2)
      for (int x3 = 0; x3 < ch.inputs()[2]; ++x3) {
        if (trace_norm(ch.marginal(1, x1, x2, x3) - ch.marginal(1, 0, x2, 0)) > tol)
          throw Error(ErrorKind::Not3to1, "receiver 2 sees inputs other than x2");
        if (trace_norm(ch.marginal(2, x1, x2, x3) - ch.marginal(2, 0, 0, x3)) > tol)
          throw Error(ErrorKind::Not3to1, "receiver 3 sees inputs other than x3");
      }
}

UnstructuredBounds unstructured_bounds(const ChannelSpec& ch, const UnstructuredPmf& p) {
  validate(ch, p);
  require_3to1(ch);
  const int n1 = ch.inputs()[0], n2 = ch.inputs()[1], n3 = ch.inputs()[2];
  std::vector<Register> regs = {{"X1", n1}, {"U2", p.u2}, {"X2", n2}, {"U3", p.u3}, {"X3", n3}};
  std::array<CqState, 3> st = {CqState(regs, ch.output_dims()[0]), CqState(regs, ch.output_dims()[1]),
                               CqState(regs, ch.output_dims()[2])};
  for (int r = 0; r < 3; ++r) {
    auto& s = st[static_cast<size_t>(r)];
    std::vector<int> op(static_cast<size_t>(ch.input_count()), -1);
    for (int x1 = 0; x1 < n1; ++x1)
      for (int u2 = 0; u2 < p.u2; ++u2)
        for (int x2 = 0; x2 < n2; ++x2)
          for (int u3 = 0; u3 < p.u3; ++u3)
            for (int x3 = 0; x3 < n3; ++x3) {
              const double w = p.p_x1[x1] * p.p_u2x2[static_cast<size_t>(u2 * n2 + x2)] *
                               p.p_u3x3[static_cast<size_t>(u3 * n3 + x3)];
              if (w <= 0) continue;
              auto& idx = op[static_cast<size_t>(ch.flat_index(x1, x2, x3))];
              if (idx < 0) idx = s.add_operator_unchecked(ch.marginal(r, x1, x2, x3));
              s.add_point({x1, u2, x2, u3, x3}, w, idx);
            }
  }
  UnstructuredBounds b;
  const auto& s1 = st[0];
  const double i2 = conditional_mutual_info(st[1], {{"X2"}, false}, kY, {{"U2"}, false});
  const double i3 = conditional_mutual_info(st[2], {{"X3"}, false}, kY, {{"U3"}, false});
  b.r1 = conditional_mutual_info(s1, {{"X1"}, false}, kY, {{"U2", "U3"}, false});
  b.r2 = mutual_info(st[1], {{"U2", "X2"}, false}, kY);
  b.r3 = mutual_info(st[2], {{"U3", "X3"}, false}, kY);
  b.r12 = conditional_mutual_info(s1, {{"U2", "X1"}, false}, kY, {{"U3"}, false}) + i2;
  b.r13 = conditional_mutual_info(s1, {{"U3", "X1"}, false}, kY, {{"U2"}, false}) + i3;
  b.r123 = mutual_info(s1, {{"U2", "U3", "X1"}, false}, kY) + i2 + i3;
  const auto& k = ch.costs();
  for (int x = 0; x < n1; ++x) b.cost[0] += p.p_x1[x] * k[0][static_cast<size_t>(x)];
  for (int u = 0; u < p.u2; ++u)
    for (int x = 0; x < n2; ++x) b.cost[1] += p.p_u2x2[static_cast<size_t>(u * n2 + x)] * k[1][static_cast<size_t>(x)];
  for (int u = 0; u < p.u3; ++u)
    for (int x = 0; x < n3; ++x) b.cost[2] += p.p_u3x3[static_cast<size_t>(u * n3 + x)] * k[2][static_cast<size_t>(x)];
  return b;
}

RegionReport unstructured_3to1_check(const ChannelSpec& ch, const UnstructuredPmf& pmf, const Rates& rates,
                                     const CostVector& tau) {
  const auto b = unstructured_bounds(ch, pmf);
  RegionReport rep;
  rep.system = "unstructured";
  rep.rates = rates;
  using detail::less;
  auto& r = rep.records;
  r.push_back(less("ua.R1", rates[0], b.r1));
  r.push_back(less("ua.R2", rates[1], b.r2));
  r.push_back(less("ua.R3", rates[2], b.r3));
  r.push_back(less("ua.R1+R2", rates[0] + rates[1], b.r12));
  r.push_back(less("ua.R1+R3", rates[0] + rates[2], b.r13));
  r.push_back(less("ua.R1+R2+R3", rates[0] + rates[1] + rates[2], b.r123));
  detail::add_costs(r, b.cost, tau);
  rep.feasible = detail::verdict(r);
  return rep;
}

RegionReport unstructured_3to1_check(const ChannelSpec& ch, const UnstructuredPmf& pmf, const Rates& rates) {
  return unstructured_3to1_check(ch, pmf, rates, ch.tau());
}

std::optional<double> unstructured_r1_sup(const ChannelSpec& ch, const UnstructuredPmf& pmf, double r2, double r3) {
  const auto b = unstructured_bounds(ch, pmf);
  const auto& tol = tolerances();
  const auto& tau = ch.tau();
  for (int j = 0; j < 3; ++j)
    if (b.cost[static_cast<size_t>(j)] > tau[static_cast<size_t>(j)] + tol.prob) return std::nullopt;
  if (!(b.r2 - r2 > tol.rate && b.r3 - r3 > tol.rate)) return std::nullopt;
  const double sup = std::min({b.r1, b.r12 - r2, b.r13 - r3, b.r123 - r2 - r3});
  if (!(sup > tol.rate)) return std::nullopt;
  return sup;
}

}  // namespace cqrl::regions
