#include <algorithm>
#include <cmath>

#include "cqrl/errors.hpp"
#include "layered_internal.hpp"

namespace cqrl::regions {

namespace {

using Sense = LinearConstraint::Sense;
using Terms = std::vector<std::pair<std::string, double>>;

std::vector<std::vector<int>> subsets(const std::vector<int>& items) {
  std::vector<std::vector<int>> out;
  const unsigned n = static_cast<unsigned>(items.size());
  for (unsigned m = 0; m < (1u << n); ++m) {
    std::vector<int> s;
    for (unsigned b = 0; b < n; ++b)
      if (m & (1u << b)) s.push_back(items[b]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

// Receiver j (partners i < k) decodes its own layers U_{ji}, U_{jk}, X_j and
// the sum U_j^⊕ = U_{ij} ⊕ U_{kj}. S is the total rate of a coset layer, S − T
// its binning rate; K, L are the binning and message rates of X_j.
RegionReport thm2_feasible(const ChannelSpec& ch, const Thm2Config& cfg, const Rates& rates, const LayeredOptions& opt) {
  const auto& L = cfg.layers;
  validate_layers(ch, L);
  for (const auto& t : L.tx)
    if (t.v_first != 1 || t.v_second != 1) throw Error(ErrorKind::ConfigMismatch, "IID layers are not part of this system");

  detail::SystemBuilder sys;
  for (int j = 0; j < 3; ++j) {
    const auto p = partners(j);
    const std::string J = std::to_string(j + 1);
    detail::ReceiverEntropy ent(layered_receiver_state(ch, L, j));
    const std::string X = "X" + J, Up = "U" + J + "+";

    std::vector<int> own;  // partner targets with an active layer
    for (int t : p)
      if (detail::u_size(L, j, t) > 1) own.push_back(t);
    std::vector<std::pair<int, std::string>> incoming;  // (owner, suffix)
    if (detail::u_size(L, p[0], j) > 1) incoming.emplace_back(p[0], "+ij");
    if (detail::u_size(L, p[1], j) > 1) incoming.emplace_back(p[1], "+kj");
    const int up = std::max(detail::u_size(L, p[0], j), detail::u_size(L, p[1], j));
    const double logv = std::log2(static_cast<double>(up));
    const double hx = ent.h({X}, false);

    for (const auto& A : subsets(own)) {
      std::vector<std::string> ua, uac, lab;
      Terms s_a, s_minus_t;
      double loga = 0.0;
      for (int t : own) {
        const bool in = std::find(A.begin(), A.end(), t) != A.end();
        const std::string n = pair_name(j, t);
        (in ? ua : uac).push_back("U" + n);
        if (in) {
          lab.push_back(n);
          loga += std::log2(static_cast<double>(detail::u_size(L, j, t)));
          s_a.emplace_back("S" + n, 1.0);
          s_minus_t.emplace_back("S" + n, 1.0);
          s_minus_t.emplace_back("T" + n, -1.0);
        }
      }
      const std::string tag = "j=" + J + ".A=" + detail::set_label(lab);
      auto plus = [](Terms a, const Terms& b) { a.insert(a.end(), b.begin(), b.end()); return a; };
      auto cat = [](std::vector<std::string> a, const std::vector<std::string>& b) { a.insert(a.end(), b.begin(), b.end()); return a; };
      const Terms kl = {{"K" + J, 1.0}, {"L" + J, 1.0}};

      // source coding
      sys.row("thm2.src." + tag + "+K", plus(s_minus_t, {{"K" + J, 1.0}}), Sense::Greater,
              loga + hx - ent.h(cat(ua, {X}), false));
      if (!A.empty()) sys.row("thm2.src." + tag, s_minus_t, Sense::Greater, loga - ent.h(ua, false));

      // channel coding
      if (!A.empty()) sys.row("thm2.chnl." + tag, s_a, Sense::Less, loga - ent.cond(ua, cat(uac, {Up, X}), true));
      for (const auto& [o, suf] : incoming) {
        if (A.empty() && opt.drop_dont_care) continue;
        sys.row("thm2.chnl." + tag + suf, plus(s_a, {{"S" + pair_name(o, j), 1.0}}), Sense::Less,
                loga + logv - ent.cond(cat(ua, {Up}), cat(uac, {X}), true));
      }
      sys.row("thm2.chnl." + tag + "+KL", plus(s_a, kl), Sense::Less, loga + hx - ent.cond(cat(ua, {X}), cat(uac, {Up}), true));
      for (const auto& [o, suf] : incoming)
        sys.row("thm2.chnl." + tag + "+KL" + suf, plus(plus(s_a, kl), {{"S" + pair_name(o, j), 1.0}}), Sense::Less,
                loga + logv + hx - ent.cond(cat(ua, {X, Up}), uac, true));
    }
    Terms eq = {{"L" + J, 1.0}};
    for (int t : own) eq.emplace_back("T" + pair_name(j, t), 1.0);
    sys.row("eq.R" + J, eq, Sense::Equal, rates[static_cast<size_t>(j)], false);
  }
  return sys.solve("thm2", rates, detail::layered_costs(ch, L), ch.tau());
}

}  // namespace cqrl::regions
