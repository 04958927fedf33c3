#include <cmath>
#include <numeric>

#include "cqrl/errors.hpp"
#include "cqrl/gf.hpp"
#include "cqrl/tolerances.hpp"
#include "layered_internal.hpp"

namespace cqrl::regions {

std::array<int, 2> partners(int j) {
  if (j == 0) return {1, 2};
  if (j == 1) return {0, 2};
  return {0, 1};
}

std::string pair_name(int owner, int target) { return std::to_string(owner + 1) + std::to_string(target + 1); }

TxLayers coset_layers(int u_first, int u_second, std::vector<double> joint) {
  TxLayers t;
  t.u_first = u_first;
  t.u_second = u_second;
  t.joint = std::move(joint);
  return t;
}

namespace detail {

namespace {
int slot(int owner, int target) {
  const auto p = partners(owner);
  if (target == p[0]) return 0;
  if (target == p[1]) return 1;
  throw Error(ErrorKind::DomainError, "layer target equals owner");
}
}  // namespace

int u_size(const LayeredConfig& cfg, int owner, int target) {
  const auto& t = cfg.tx[static_cast<size_t>(owner)];
  return slot(owner, target) == 0 ? t.u_first : t.u_second;
}

int v_size(const LayeredConfig& cfg, int owner, int target) {
  const auto& t = cfg.tx[static_cast<size_t>(owner)];
  return slot(owner, target) == 0 ? t.v_first : t.v_second;
}

int x_size(const TxLayers& t) {
  const int layers = t.u_first * t.u_second * t.v_first * t.v_second;
  return layers > 0 ? static_cast<int>(t.joint.size()) / layers : 0;
}

double ReceiverEntropy::h(const std::vector<std::string>& names, bool quantum) {
  const uint64_t mask = s_.mask_of(names);
  const auto key = std::make_pair(mask, quantum);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double v = s_.entropy_mask(mask, quantum);
  cache_.emplace(key, v);
  return v;
}

double ReceiverEntropy::cond(const std::vector<std::string>& a, const std::vector<std::string>& b, bool y) {
  std::vector<std::string> ab = a;
  ab.insert(ab.end(), b.begin(), b.end());
  return h(ab, y) - h(b, y);
}

int SystemBuilder::var(const std::string& name) {
  auto it = index_.find(name);
  if (it != index_.end()) return it->second;
  const int id = static_cast<int>(names_.size());
  names_.push_back(name);
  index_.emplace(name, id);
  return id;
}

void SystemBuilder::row(std::string label, const std::vector<std::pair<std::string, double>>& terms,
                        LinearConstraint::Sense sense, double rhs, bool strict) {
  Pending p{std::move(label), {}, sense, rhs, strict};
  for (const auto& [n, c] : terms) p.terms.emplace_back(var(n), c);
  rows_.push_back(std::move(p));
}

RegionReport SystemBuilder::solve(std::string system, const Rates& rates, const CostVector& used,
                                  const CostVector& tau) const {
  using Sense = LinearConstraint::Sense;
  const auto& tol = tolerances();
  const int n = static_cast<int>(names_.size());
  std::vector<LinearConstraint> rows;
  rows.reserve(rows_.size());
  for (const auto& p : rows_) {
    LinearConstraint c;
    c.label = p.label;
    c.coeffs.assign(static_cast<size_t>(n), 0.0);
    for (const auto& [i, v] : p.terms) c.coeffs[static_cast<size_t>(i)] += v;
    c.sense = p.sense;
    c.rhs = p.rhs;
    c.strict = p.strict;
    rows.push_back(std::move(c));
  }
  const auto lp = lp_feasible(n, rows, 2.0 * tol.rate, tol.lp_residual);

  RegionReport rep;
  rep.system = std::move(system);
  rep.rates = rates;
  for (const auto& c : rows) {
    double lhs = 0.0;
    for (int v = 0; v < n; ++v) lhs += c.coeffs[static_cast<size_t>(v)] * lp.x[static_cast<size_t>(v)];
    switch (c.sense) {
      case Sense::Less: rep.records.push_back(less(c.label, lhs, c.rhs, c.strict)); break;
      case Sense::Greater: rep.records.push_back(greater(c.label, lhs, c.rhs, c.strict)); break;
      case Sense::Equal: rep.records.push_back({c.label, lhs, c.rhs, -std::abs(lhs - c.rhs), false}); break;
    }
  }
  add_costs(rep.records, used, tau);
  rep.feasible = lp.feasible && verdict(rep.records);
  if (rep.feasible) {
    RateAllocation w;
    for (int v = 0; v < n; ++v) w.values[names_[static_cast<size_t>(v)]] = lp.x[static_cast<size_t>(v)];
    rep.witness = std::move(w);
  }
  return rep;
}

CostVector layered_costs(const ChannelSpec& ch, const LayeredConfig& cfg) {
  CostVector c{};
  for (int j = 0; j < 3; ++j) {
    const auto& t = cfg.tx[static_cast<size_t>(j)];
    const int nx = x_size(t);
    for (size_t e = 0; e < t.joint.size(); ++e)
      c[static_cast<size_t>(j)] += t.joint[e] * ch.costs()[static_cast<size_t>(j)][e % static_cast<size_t>(nx)];
  }
  return c;
}

std::string set_label(const std::vector<std::string>& members) {
  std::string s = "{";
  for (size_t i = 0; i < members.size(); ++i) s += (i ? "," : "") + members[i];
  return s + "}";
}

}  // namespace detail

using detail::u_size;
using detail::x_size;

void validate_layers(const ChannelSpec& ch, const LayeredConfig& cfg) {
  auto bad = [](const std::string& m) { throw Error(ErrorKind::ConfigMismatch, m); };
  for (int j = 0; j < 3; ++j) {
    const auto& t = cfg.tx[static_cast<size_t>(j)];
    for (int s : {t.u_first, t.u_second, t.v_first, t.v_second})
      if (s < 1) bad("layer alphabets must be nonempty");
    for (int s : {t.u_first, t.u_second})
      if (s > 1 && !gf::is_supported_prime(s)) bad("coset layer size must be 1 or a supported prime");
    const size_t expect = static_cast<size_t>(t.u_first) * t.u_second * t.v_first * t.v_second * ch.inputs()[static_cast<size_t>(j)];
    if (t.joint.size() != expect) bad("joint pmf of transmitter " + std::to_string(j + 1) + " has the wrong size");
    (void)Pmf(t.joint);
  }
  for (int target = 0; target < 3; ++target) {
    const auto p = partners(target);
    const int a = u_size(cfg, p[0], target), b = u_size(cfg, p[1], target);
    if (a > 1 && b > 1 && a != b)
      bad("layers " + pair_name(p[0], target) + " and " + pair_name(p[1], target) + " must share a field");
  }
}

namespace {

struct TxIndex {
  int vf, vs, uf, us, x;
};

TxIndex decode(const TxLayers& t, size_t e) {
  const int nx = x_size(t);
  TxIndex r{};
  size_t q = e;
  r.x = static_cast<int>(q % static_cast<size_t>(nx)); q /= static_cast<size_t>(nx);
  r.us = static_cast<int>(q % static_cast<size_t>(t.u_second)); q /= static_cast<size_t>(t.u_second);
  r.uf = static_cast<int>(q % static_cast<size_t>(t.u_first)); q /= static_cast<size_t>(t.u_first);
  r.vs = static_cast<int>(q % static_cast<size_t>(t.v_second)); q /= static_cast<size_t>(t.v_second);
  r.vf = static_cast<int>(q);
  return r;
}

// p(u_{o→target}, x_o) flattened as [u][x].
std::vector<double> toward(const LayeredConfig& cfg, int owner, int target, int& usz, int& nx) {
  const auto& t = cfg.tx[static_cast<size_t>(owner)];
  nx = x_size(t);
  const bool first = partners(owner)[0] == target;
  usz = first ? t.u_first : t.u_second;
  std::vector<double> m(static_cast<size_t>(usz * nx), 0.0);
  for (size_t e = 0; e < t.joint.size(); ++e) {
    const auto d = decode(t, e);
    m[static_cast<size_t>((first ? d.uf : d.us) * nx + d.x)] += t.joint[e];
  }
  return m;
}

int xi_index(int own, int xo, int other_a, int xa, int other_b, int xb, int j, std::array<int, 3>& xs) {
  xs[static_cast<size_t>(j)] = xo;
  xs[static_cast<size_t>(other_a)] = xa;
  xs[static_cast<size_t>(other_b)] = xb;
  return own;
}

struct Effective {
  int up = 1;  // υ_j
  std::vector<double> p_up;
  std::vector<Mat> xi;  // [x_j * up + u⊕]
};

Effective effective(const ChannelSpec& ch, const LayeredConfig& cfg, int j) {
  const auto p = partners(j);
  int ua, na, ub, nb;
  const auto ma = toward(cfg, p[0], j, ua, na);
  const auto mb = toward(cfg, p[1], j, ub, nb);
  Effective e;
  e.up = std::max(ua, ub);
  const int nj = ch.inputs()[static_cast<size_t>(j)];
  const int d = ch.output_dims()[static_cast<size_t>(j)];
  e.p_up.assign(static_cast<size_t>(e.up), 0.0);
  e.xi.assign(static_cast<size_t>(nj * e.up), Mat::Zero(d, d));
  std::array<int, 3> xs{};
  for (int a = 0; a < ua; ++a)
    for (int xa = 0; xa < na; ++xa)
      for (int b = 0; b < ub; ++b)
        for (int xb = 0; xb < nb; ++xb) {
          const double w = ma[static_cast<size_t>(a * na + xa)] * mb[static_cast<size_t>(b * nb + xb)];
          if (w <= 0) continue;
          const int u = (a + b) % e.up;
          e.p_up[static_cast<size_t>(u)] += w;
          for (int xj = 0; xj < nj; ++xj) {
            xi_index(0, xj, p[0], xa, p[1], xb, j, xs);
            e.xi[static_cast<size_t>(xj * e.up + u)] += w * ch.marginal(j, xs[0], xs[1], xs[2]);
          }
        }
  for (int u = 0; u < e.up; ++u)
    if (e.p_up[static_cast<size_t>(u)] > 0)
      for (int xj = 0; xj < nj; ++xj) e.xi[static_cast<size_t>(xj * e.up + u)] /= e.p_up[static_cast<size_t>(u)];
  return e;
}

std::string up_name(int j) { return "U" + std::to_string(j + 1) + "+"; }

}  // namespace

CqState layered_receiver_state(const ChannelSpec& ch, const LayeredConfig& cfg, int j) {
  validate_layers(ch, cfg);
  const auto p = partners(j);
  const auto& t = cfg.tx[static_cast<size_t>(j)];
  const auto e = effective(ch, cfg, j);
  const int nj = ch.inputs()[static_cast<size_t>(j)];
  CqState s({{"U" + pair_name(j, p[0]), t.u_first},
             {"U" + pair_name(j, p[1]), t.u_second},
             {"V" + pair_name(j, p[0]), t.v_first},
             {"V" + pair_name(j, p[1]), t.v_second},
             {"X" + std::to_string(j + 1), nj},
             {up_name(j), e.up}},
            ch.output_dims()[static_cast<size_t>(j)]);
  std::vector<int> op(e.xi.size(), -1);
  for (size_t idx = 0; idx < t.joint.size(); ++idx) {
    if (t.joint[idx] <= 0) continue;
    const auto d = decode(t, idx);
    for (int u = 0; u < e.up; ++u) {
      const double pu = e.p_up[static_cast<size_t>(u)];
      if (pu <= 0) continue;
      auto& o = op[static_cast<size_t>(d.x * e.up + u)];
      if (o < 0) o = s.add_operator(e.xi[static_cast<size_t>(d.x * e.up + u)]);
      s.add_point({d.uf, d.us, d.vf, d.vs, d.x, u}, t.joint[idx] * pu, o);
    }
  }
  return s;
}

CqState effective_cqmac_state(const ChannelSpec& ch, const LayeredConfig& cfg, int j) {
  validate_layers(ch, cfg);
  const auto& t = cfg.tx[static_cast<size_t>(j)];
  const auto e = effective(ch, cfg, j);
  const int nj = ch.inputs()[static_cast<size_t>(j)];
  CqState s({{"Z1", t.u_first}, {"Z2", t.u_second}, {"Z3", nj}, {"Z4", e.up}}, ch.output_dims()[static_cast<size_t>(j)]);
  std::vector<int> op(e.xi.size(), -1);
  for (size_t idx = 0; idx < t.joint.size(); ++idx) {
    if (t.joint[idx] <= 0) continue;
    const auto d = decode(t, idx);
    for (int u = 0; u < e.up; ++u) {
      const double pu = e.p_up[static_cast<size_t>(u)];
      if (pu <= 0) continue;
      auto& o = op[static_cast<size_t>(d.x * e.up + u)];
      if (o < 0) o = s.add_operator(e.xi[static_cast<size_t>(d.x * e.up + u)]);
      s.add_point({d.uf, d.us, d.x, u}, t.joint[idx] * pu, o);
    }
  }
  return s;
}

CqState layered_full_state(const ChannelSpec& ch, const LayeredConfig& cfg, int j) {
  validate_layers(ch, cfg);
  std::vector<Register> regs;
  for (int o = 0; o < 3; ++o) {
    const auto p = partners(o);
    const auto& t = cfg.tx[static_cast<size_t>(o)];
    regs.push_back({"U" + pair_name(o, p[0]), t.u_first});
    regs.push_back({"U" + pair_name(o, p[1]), t.u_second});
    regs.push_back({"V" + pair_name(o, p[0]), t.v_first});
    regs.push_back({"V" + pair_name(o, p[1]), t.v_second});
    regs.push_back({"X" + std::to_string(o + 1), ch.inputs()[static_cast<size_t>(o)]});
  }
  std::array<int, 3> ups{};
  for (int r = 0; r < 3; ++r) {
    const auto p = partners(r);
    ups[static_cast<size_t>(r)] = std::max(u_size(cfg, p[0], r), u_size(cfg, p[1], r));
    regs.push_back({up_name(r), ups[static_cast<size_t>(r)]});
  }
  CqState s(regs, ch.output_dims()[static_cast<size_t>(j)]);
  std::vector<int> op(static_cast<size_t>(ch.input_count()), -1);
  const auto& t0 = cfg.tx[0];
  const auto& t1 = cfg.tx[1];
  const auto& t2 = cfg.tx[2];
  for (size_t a = 0; a < t0.joint.size(); ++a) {
    if (t0.joint[a] <= 0) continue;
    for (size_t b = 0; b < t1.joint.size(); ++b) {
      if (t1.joint[b] <= 0) continue;
      for (size_t c = 0; c < t2.joint.size(); ++c) {
        if (t2.joint[c] <= 0) continue;
        const std::array<TxIndex, 3> d = {decode(t0, a), decode(t1, b), decode(t2, c)};
        std::vector<int> tuple;
        for (int o = 0; o < 3; ++o) {
          const auto& q = d[static_cast<size_t>(o)];
          tuple.insert(tuple.end(), {q.uf, q.us, q.vf, q.vs, q.x});
        }
        // U_r^⊕ = U_{ir} ⊕ U_{kr}; layer o→r sits in slot 0 when r is o's first partner.
        for (int r = 0; r < 3; ++r) {
          const auto p = partners(r);
          int sum = 0;
          for (int o : p) {
            const auto& q = d[static_cast<size_t>(o)];
            sum += partners(o)[0] == r ? q.uf : q.us;
          }
          tuple.push_back(sum % ups[static_cast<size_t>(r)]);
        }
        const int flat = ch.flat_index(d[0].x, d[1].x, d[2].x);
        auto& o = op[static_cast<size_t>(flat)];
        if (o < 0) o = s.add_operator_unchecked(ch.marginal(j, d[0].x, d[1].x, d[2].x));
        s.add_point(tuple, t0.joint[a] * t1.joint[b] * t2.joint[c], o);
      }
    }
  }
  return s;
}

double source_bound_divergence(const TxLayers& t, unsigned subset) {
  const int nx = x_size(t);
  std::vector<double> px(static_cast<size_t>(nx), 0.0);
  std::map<std::array<int, 3>, double> r;
  for (size_t e = 0; e < t.joint.size(); ++e) {
    if (t.joint[e] <= 0) continue;
    const auto d = decode(t, e);
    px[static_cast<size_t>(d.x)] += t.joint[e];
    const std::array<int, 3> key = {(subset & 1u) ? d.uf : 0, (subset & 2u) ? d.us : 0, (subset & 4u) ? d.x : 0};
    r[key] += t.joint[e];
  }
  double div = 0.0;
  for (const auto& [k, p] : r) {
    double q = 1.0;
    if (subset & 1u) q /= t.u_first;
    if (subset & 2u) q /= t.u_second;
    if (subset & 4u) q *= px[static_cast<size_t>(k[2])];
    div += p * std::log2(p / q);
  }
  return div;
}

}  // namespace cqrl::regions
