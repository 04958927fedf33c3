#include <algorithm>
#include <cmath>

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

// Parse adopted for the enlarged system. For every receiver j, A ⊆ active
// coset layers of user j and C ⊆ active IID layers of user j:
//   src      β_C + S_A            > Σ log|U_a| + Σ H(V_c) − H(U_A, V_C)          (A, C not both empty)
//   src+K    β_C + S_A + K_j      > Σ log|U_a| + Σ H(V_c) + H(X_j) − H(U_A, V_C, X_j)
//   chnl     S_A+T_A+β_C+ν_C      < Σ log|U_a| + Σ H(V_c) − H(U_A,V_C | U_Aᶜ,V_Cᶜ,U_j^⊕,X_j,Y_j)   (not both empty)
//   chnl+ij  … + S_ij + T_ij      < Σ log|U_a| + log υ_j + Σ H(V_c) − H(U_A,V_C,U_j^⊕ | U_Aᶜ,V_Cᶜ,X_j,Y_j)
//   chnl+kj  … + S_kj + T_kj      < same right side as chnl+ij
//   chnl+KL  … + K_j + L_j        < Σ log|U_a| + H(X_j) + Σ H(V_c) − H(U_A,V_C,X_j | U_Aᶜ,V_Cᶜ,U_j^⊕,Y_j)
//   chnl+KL+ij / +KL+kj           < Σ log|U_a| + log υ_j + H(X_j) + Σ H(V_c) − H(U_A,V_C,X_j,U_j^⊕ | U_Aᶜ,V_Cᶜ,Y_j)
// with U_j^⊕ = U_ij ⊕ U_kj and R_j = ν_ji + ν_jk + T_ji + T_jk + L_j. Here S
// is a binning rate and T a message rate.
RegionReport thm3_feasible(const ChannelSpec& ch, const Thm3Config& cfg, const Rates& rates, const LayeredOptions& opt) {
  const auto& L = cfg.layers;
  validate_layers(ch, L);

  detail::SystemBuilder sys;
  for (int j = 0; j < 3; ++j) {
    const auto p = partners(j);
    const std::string J = std::to_string(j + 1);
    detail::ReceiverEntropy ent(layered_receiver_state(ch, L, j));
    const std::string X = "X" + J, Up = "U" + J + "+";

    std::vector<int> own_u, own_v;
    for (int t : p) {
      if (detail::u_size(L, j, t) > 1) own_u.push_back(t);
      if (detail::v_size(L, j, t) > 1) own_v.push_back(t);
    }
    std::vector<std::pair<int, std::string>> incoming;
    if (detail::u_size(L, p[0], j) > 1) incoming.emplace_back(p[0], "+ij");
    if (detail::u_size(L, p[1], j) > 1) incoming.emplace_back(p[1], "+kj");
    const int up = std::max(detail::u_size(L, p[0], j), detail::u_size(L, p[1], j));
    const double logv = std::log2(static_cast<double>(up));
    const double hx = ent.h({X}, false);
    auto plus = [](Terms a, const Terms& b) { a.insert(a.end(), b.begin(), b.end()); return a; };
    auto cat = [](std::vector<std::string> a, const std::vector<std::string>& b) { a.insert(a.end(), b.begin(), b.end()); return a; };
    const Terms kl = {{"K" + J, 1.0}, {"L" + J, 1.0}};

    for (const auto& A : subsets(own_u)) {
      for (const auto& C : subsets(own_v)) {
        std::vector<std::string> in, out, la, lc;
        Terms src, msg;  // binning terms; binning + message terms
        double base = 0.0;
        for (int t : own_u) {
          const std::string n = pair_name(j, t);
          if (std::find(A.begin(), A.end(), t) != A.end()) {
            in.push_back("U" + n);
            la.push_back(n);
            base += std::log2(static_cast<double>(detail::u_size(L, j, t)));
            src.emplace_back("S" + n, 1.0);
            msg.emplace_back("S" + n, 1.0);
            msg.emplace_back("T" + n, 1.0);
          } else {
            out.push_back("U" + n);
          }
        }
        for (int t : own_v) {
          const std::string n = pair_name(j, t);
          if (std::find(C.begin(), C.end(), t) != C.end()) {
            in.push_back("V" + n);
            lc.push_back(n);
            base += ent.h({"V" + n}, false);
            src.emplace_back("beta" + n, 1.0);
            msg.emplace_back("beta" + n, 1.0);
            msg.emplace_back("nu" + n, 1.0);
          } else {
            out.push_back("V" + n);
          }
        }
        const bool empty = A.empty() && C.empty();
        const std::string tag = "j=" + J + ".A=" + detail::set_label(la) + ".C=" + detail::set_label(lc);

        if (!empty) sys.row("thm3.src." + tag, src, Sense::Greater, base - ent.h(in, false));
        sys.row("thm3.src." + tag + "+K", plus(src, {{"K" + J, 1.0}}), Sense::Greater, base + hx - ent.h(cat(in, {X}), false));

        if (!empty) sys.row("thm3.chnl." + tag, msg, Sense::Less, base - ent.cond(in, cat(out, {Up, X}), true));
        for (const auto& [o, suf] : incoming) {
          if (empty && opt.drop_dont_care) continue;
          const std::string n = pair_name(o, j);
          sys.row("thm3.chnl." + tag + suf, plus(msg, {{"S" + n, 1.0}, {"T" + n, 1.0}}), Sense::Less,
                  base + logv - ent.cond(cat(in, {Up}), cat(out, {X}), true));
        }
        sys.row("thm3.chnl." + tag + "+KL", plus(msg, kl), Sense::Less, base + hx - ent.cond(cat(in, {X}), cat(out, {Up}), true));
        for (const auto& [o, suf] : incoming) {
          const std::string n = pair_name(o, j);
          sys.row("thm3.chnl." + tag + "+KL" + suf, plus(plus(msg, kl), {{"S" + n, 1.0}, {"T" + n, 1.0}}), Sense::Less,
                  base + logv + hx - ent.cond(cat(in, {X, Up}), out, true));
        }
      }
    }
    Terms eq = {{"L" + J, 1.0}};
    for (int t : own_u) eq.emplace_back("T" + pair_name(j, t), 1.0);
    for (int t : own_v) eq.emplace_back("nu" + pair_name(j, t), 1.0);
    sys.row("eq.R" + J, eq, Sense::Equal, rates[static_cast<size_t>(j)], false);
  }
  return sys.solve("thm3", rates, detail::layered_costs(ch, L), ch.tau());
}

}  // namespace cqrl::regions
