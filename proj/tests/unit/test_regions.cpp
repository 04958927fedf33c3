#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "cqrl/channels.hpp"
#include "cqrl/mcsim.hpp"
#include "cqrl/regions.hpp"
#include "cqrl/rng.hpp"
#include "cqrl/scalar.hpp"
#include "cqrl/tiltlab.hpp"
#include "expect_kind.hpp"

using namespace cqrl;
using namespace cqrl::regions;

namespace {

std::vector<double> random_pmf(Rng& rng, int n) {
  std::vector<double> p(static_cast<size_t>(n));
  double s = 0;
  for (auto& x : p) s += (x = rng.uniform01() + 0.05);
  for (auto& x : p) x /= s;
  return p;
}

// Every composition of `total` into `parts` nonnegative integers.
void compositions(int parts, int total, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& f) {
  if (static_cast<int>(cur.size()) == parts - 1) {
    cur.push_back(total);
    f(cur);
    cur.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    cur.push_back(v);
    compositions(parts, total - v, cur, f);
    cur.pop_back();
  }
}

std::vector<std::vector<double>> lattice(int cells, int D) {
  std::vector<std::vector<double>> out;
  std::vector<int> cur;
  compositions(cells, D, cur, [&](const std::vector<int>& c) {
    std::vector<double> p;
    for (int v : c) p.push_back(static_cast<double>(v) / D);
    out.push_back(p);
  });
  return out;
}

double entropy_of(const Mat& rho) { return entropy_bits(hermitian_part(rho)); }

Thm1Config ex1_config(double tau) {
  Thm1Config c;
  c.field = 2;
  c.p_x1 = Pmf::bernoulli(tau);
  c.p_u2 = Pmf::uniform(2);
  c.p_u3 = Pmf::uniform(2);
  c.f2 = {0, 1};
  c.f3 = {0, 1};
  return c;
}

}  // namespace

TEST(Thm1, Ex1BoundsMatchThresholds) {
  const std::array<double, 3> d = {0.1, 0.05, 0.2};
  const double tau = 0.25;
  const auto ch = channels::build_ex1(d[0], d[1], d[2], tau);
  const auto b = thm1_bounds(ch, ex1_config(tau));
  const auto t = mcsim::ex1_thresholds(d, tau);
  EXPECT_NEAR(b.r1, t.r1, 1e-10);
  EXPECT_NEAR(b.r2, t.rj[0], 1e-10);
  EXPECT_NEAR(b.r3, t.rj[1], 1e-10);
  EXPECT_NEAR(b.pair, t.sum, 1e-10);
  EXPECT_NEAR(b.sum_coset, t.sum, 1e-10);
  EXPECT_NEAR(b.cost[0], tau, 1e-12);
}

TEST(Thm1, FeasibleSetIsMonotoneAndConvex) {
  const auto ch = channels::build_ex1(0.1, 0.1, 0.1, 0.25);
  const auto cfg = ex1_config(0.25);
  Rng rng(3);
  std::vector<Rates> feas;
  for (int t = 0; t < 300; ++t) {
    const Rates r = {0.5 * rng.uniform01(), 0.6 * rng.uniform01(), 0.6 * rng.uniform01()};
    if (!thm1_check(ch, cfg, r).feasible) continue;
    feas.push_back(r);
    EXPECT_TRUE(thm1_check(ch, cfg, {0.9 * r[0], 0.5 * r[1], r[2]}).feasible);
  }
  ASSERT_GT(feas.size(), 20u);
  for (size_t i = 1; i < feas.size(); ++i) {
    const auto& a = feas[i - 1];
    const auto& b = feas[i];
    EXPECT_TRUE(thm1_check(ch, cfg, {(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2}).feasible);
  }
}

TEST(Thm1, CostBudgetIsNonStrict) {
  const double tau = 0.25;
  const auto ch = channels::build_ex1(0.1, 0.1, 0.1, tau);
  const auto rep = thm1_check(ch, ex1_config(tau), {0.01, 0.01, 0.01});
  EXPECT_TRUE(rep.feasible);
  EXPECT_FALSE(thm1_check(ch, ex1_config(0.3), {0.01, 0.01, 0.01}).feasible);
}

TEST(Thm1, SwappingUsersTwoAndThreeSwapsBounds) {
  Rng rng(4);
  Thm1Config c;
  c.field = 3;
  c.p_x1 = Pmf(random_pmf(rng, 2));
  c.p_u2 = Pmf(random_pmf(rng, 3));
  c.p_u3 = Pmf(random_pmf(rng, 3));
  c.f2 = {0, 1, 1};
  c.f3 = {0, 1, 0};
  Thm1Config s = c;
  std::swap(s.p_u2, s.p_u3);
  std::swap(s.f2, s.f3);
  const auto a = thm1_bounds(channels::build_ex3(0.8, 0.1, 0.2, 0.5, 0.5, 0.5), c);
  const auto b = thm1_bounds(channels::build_ex3(0.8, 0.2, 0.1, 0.5, 0.5, 0.5), s);
  EXPECT_NEAR(a.r1, b.r1, 1e-10);
  EXPECT_NEAR(a.r2, b.r3, 1e-10);
  EXPECT_NEAR(a.r3, b.r2, 1e-10);
  EXPECT_NEAR(a.pair, b.pair, 1e-10);
  EXPECT_NEAR(a.sum_coset, b.sum_coset, 1e-10);
}

TEST(Unstructured, BoundsMatchDirectEntropies) {
  Rng rng(5);
  const auto ch = channels::build_ex2(1.0, 0.1, 0.2, 0.5);
  UnstructuredPmf p;
  p.p_x1 = Pmf(random_pmf(rng, 2));
  p.u2 = 2;
  p.u3 = 3;
  p.p_u2x2 = random_pmf(rng, 4);
  p.p_u3x3 = random_pmf(rng, 6);
  const auto b = unstructured_bounds(ch, p);
  // Rx 1 conditional states given (x1, u2, u3), built by hand.
  auto pu = [](const std::vector<double>& j, int u) { return j[static_cast<size_t>(2 * u)] + j[static_cast<size_t>(2 * u + 1)]; };
  auto state = [&](int x1, int u2, int u3) {
    Mat m = Mat::Zero(2, 2);
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3)
        m += p.p_u2x2[static_cast<size_t>(2 * u2 + x2)] / pu(p.p_u2x2, u2) * p.p_u3x3[static_cast<size_t>(2 * u3 + x3)] /
             pu(p.p_u3x3, u3) * ch.marginal(0, x1, x2, x3);
    return m;
  };
  double h_y_given_u = 0, h_y_given_xu = 0;
  for (int u2 = 0; u2 < 2; ++u2)
    for (int u3 = 0; u3 < 3; ++u3) {
      const double w = pu(p.p_u2x2, u2) * pu(p.p_u3x3, u3);
      Mat avg = Mat::Zero(2, 2);
      for (int x1 = 0; x1 < 2; ++x1) {
        const Mat s = state(x1, u2, u3);
        avg += p.p_x1[x1] * s;
        h_y_given_xu += w * p.p_x1[x1] * entropy_of(s);
      }
      h_y_given_u += w * entropy_of(avg);
    }
  EXPECT_NEAR(b.r1, h_y_given_u - h_y_given_xu, 1e-10);
  // I(U₂X₂;Y₂) = I(X₂;Y₂) on a 3-to-1 channel.
  const double q = p.p_u2x2[1] + p.p_u2x2[3];
  const Mat y2 = (1 - q) * ch.marginal(1, 0, 0, 0) + q * ch.marginal(1, 0, 1, 0);
  EXPECT_NEAR(b.r2, entropy_of(y2) - binary_entropy(0.1), 1e-10);
}

TEST(Unstructured, RejectsNon3to1) {
  std::vector<Mat> states;
  for (int i = 0; i < 8; ++i) states.push_back(Mat::Identity(8, 8) / 8.0);
  // Y₂ depends on x₃: flip a diagonal entry of the Y₂ factor.
  Mat alt = Mat::Zero(8, 8);
  alt(0, 0) = 1.0;
  states[1] = alt;
  const channels::ChannelSpec ch({2, 2, 2}, {2, 2, 2}, states, {std::vector<double>{0, 1}, {0, 1}, {0, 1}});
  EXPECT_KIND(require_3to1(ch), ErrorKind::Not3to1);
}

TEST(Scan, UnstructuredGridMatchesBruteForce) {
  const auto ch = channels::build_ex2(1.2, 0.15, 0.15, 0.5);
  const double r2 = 0.2, r3 = 0.25;
  const int D = 4;
  GridSpec g;
  g.denominator = D;
  g.max_aux = 2;
  g.refine = false;
  const auto scan = max_r1_scan(ch, EvaluatorKind::Unstructured, r2, r3, g);

  std::vector<std::pair<int, std::vector<double>>> users;
  for (int u = 1; u <= 2; ++u)
    for (const auto& p : lattice(2 * u, D)) users.emplace_back(u, p);
  double best = -1;
  for (const auto& px : lattice(2, D))
    for (const auto& a : users)
      for (const auto& b : users) {
        UnstructuredPmf p;
        p.p_x1 = Pmf(px);
        p.u2 = a.first;
        p.p_u2x2 = a.second;
        p.u3 = b.first;
        p.p_u3x3 = b.second;
        if (const auto s = unstructured_r1_sup(ch, p, r2, r3)) best = std::max(best, *s);
      }
  ASSERT_TRUE(scan.found);
  EXPECT_NEAR(scan.grid_max_r1, best, 1e-9);
  g.refine = true;
  EXPECT_GE(max_r1_scan(ch, EvaluatorKind::Unstructured, r2, r3, g).max_r1, best - 1e-12);
}

TEST(Scan, Thm1GridMatchesBruteForce) {
  const auto ch = channels::build_ex1(0.1, 0.1, 0.1, 0.25);
  const double r2 = 0.3, r3 = 0.3;
  const int D = 8;
  GridSpec g;
  g.denominator = D;
  g.field = 2;
  g.f2 = {0, 1};
  g.f3 = {0, 1};
  g.refine = false;
  const auto scan = max_r1_scan(ch, EvaluatorKind::Thm1, r2, r3, g);
  double best = -1;
  for (const auto& px : lattice(2, D))
    for (const auto& a : lattice(2, D))
      for (const auto& b : lattice(2, D)) {
        Thm1Config c = ex1_config(0.25);
        c.p_x1 = Pmf(px);
        c.p_u2 = Pmf(a);
        c.p_u3 = Pmf(b);
        if (const auto s = thm1_r1_sup(ch, c, r2, r3)) best = std::max(best, *s);
      }
  ASSERT_TRUE(scan.found);
  EXPECT_NEAR(scan.grid_max_r1, best, 1e-9);
}

TEST(Scan, OverCapIsBudgetExceeded) {
  GridSpec g;
  g.scan_cap = 10;
  EXPECT_KIND(max_r1_scan(channels::build_ex2(1.2, 0.15, 0.15, 0.125), EvaluatorKind::Unstructured, 0.1, 0.1, g),
              ErrorKind::BudgetExceeded);
}

namespace {

LayeredConfig random_coset_layers(Rng& rng) {
  LayeredConfig L;
  for (auto& tx : L.tx) tx = coset_layers(2, 2, random_pmf(rng, 8));
  return L;
}

}  // namespace

TEST(Layered, ReceiverStateMatchesFullProduct) {
  Rng rng(6);
  const auto ch = channels::build_ex2(0.9, 0.1, 0.2, 0.5);
  const auto L = random_coset_layers(rng);
  for (int j = 0; j < 3; ++j) {
    const auto rx = layered_receiver_state(ch, L, j);
    const auto full = layered_full_state(ch, L, j);
    std::vector<std::string> names;
    for (const auto& r : rx.registers()) names.push_back(r.name);
    for (unsigned m = 0; m < (1u << names.size()); ++m) {
      std::vector<std::string> sub;
      for (size_t b = 0; b < names.size(); ++b)
        if (m & (1u << b)) sub.push_back(names[b]);
      for (bool q : {false, true}) EXPECT_NEAR(rx.entropy({sub, q}), full.entropy({sub, q}), 1e-10) << j << " " << m;
    }
  }
}

TEST(Layered, SourceDivergenceMatchesEntropyForm) {
  Rng rng(7);
  const auto tx = coset_layers(2, 3, random_pmf(rng, 12));
  // joint index ((u1 * 3) + u2) * 2 + x
  for (unsigned A = 1; A < 8; ++A) {
    std::map<std::vector<int>, double> marg;
    std::vector<double> px(2, 0.0);
    for (int u1 = 0; u1 < 2; ++u1)
      for (int u2 = 0; u2 < 3; ++u2)
        for (int x = 0; x < 2; ++x) {
          const double p = tx.joint[static_cast<size_t>((u1 * 3 + u2) * 2 + x)];
          std::vector<int> key;
          if (A & 1) key.push_back(u1);
          if (A & 2) key.push_back(u2);
          if (A & 4) key.push_back(x);
          marg[key] += p;
          px[static_cast<size_t>(x)] += p;
        }
    double h = 0;
    for (const auto& [k, p] : marg)
      if (p > 0) h -= p * std::log2(p);
    const double expect = ((A & 1) ? 1.0 : 0.0) + ((A & 2) ? std::log2(3.0) : 0.0) + ((A & 4) ? shannon_entropy(px) : 0.0) - h;
    EXPECT_NEAR(source_bound_divergence(tx, A), expect, 1e-12) << A;
  }
}

TEST(Thm3, TrivialLayersCollapseToPointToPoint) {
  const auto ch = channels::build_ex2(1.1, 0.1, 0.2, 0.5);
  // User 1 stays inside its cost budget τ = 0.5; users 2 and 3 lean towards
  // 0 so receiver 1 still sees x₁.
  std::array<std::vector<double>, 3> px = {std::vector<double>{0.7, 0.3}, {0.9, 0.1}, {0.85, 0.15}};
  LayeredConfig L;
  for (int j = 0; j < 3; ++j) L.tx[static_cast<size_t>(j)].joint = px[static_cast<size_t>(j)];
  // I(X_j; Y_j) with the other inputs averaged, as the single-user oracle.
  Rates info{};
  for (int j = 0; j < 3; ++j) {
    CqState s({{"X", 2}}, 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const int in[3] = {a, b, c};
          const double p = px[0][static_cast<size_t>(a)] * px[1][static_cast<size_t>(b)] * px[2][static_cast<size_t>(c)];
          s.add_point({in[j]}, p, s.add_operator(ch.marginal(j, a, b, c)));
        }
    info[static_cast<size_t>(j)] = mutual_info(s, {{"X"}, false}, {{}, true});
    ASSERT_GT(info[static_cast<size_t>(j)], 1e-3);
  }
  const Thm3Config cfg{L};
  const auto inside = thm3_feasible(ch, cfg, {info[0] - 1e-4, info[1] - 1e-4, info[2] - 1e-4});
  EXPECT_TRUE(inside.feasible) << to_csv(inside);
  for (int j = 0; j < 3; ++j) {
    Rates r = {info[0] - 1e-4, info[1] - 1e-4, info[2] - 1e-4};
    r[static_cast<size_t>(j)] += 2e-4;
    EXPECT_FALSE(thm3_feasible(ch, cfg, r).feasible) << j;
  }
}

TEST(Thm2, StressRatesAreInfeasible) {
  Rng rng(9);
  const auto ch = channels::build_ex2(1.2, 0.15, 0.15, 0.5);
  const Thm2Config cfg{random_coset_layers(rng)};
  const auto rep = thm2_feasible(ch, cfg, {5.0, 5.0, 5.0});
  EXPECT_FALSE(rep.feasible);
  bool has_src = false, has_chnl = false;
  for (const auto& r : rep.records) {
    has_src = has_src || r.label.rfind("thm2.src", 0) == 0;
    has_chnl = has_chnl || r.label.rfind("thm2.chnl", 0) == 0;
  }
  EXPECT_TRUE(has_src);
  EXPECT_TRUE(has_chnl);
  EXPECT_FALSE(thm2_feasible(ch, cfg, {1.0, 0.0, 0.0}).feasible);
}

TEST(Thm2, RejectsIidLayers) {
  Rng rng(10);
  auto L = random_coset_layers(rng);
  L.tx[0].v_first = 2;
  L.tx[0].joint = random_pmf(rng, 16);
  EXPECT_KIND(thm2_feasible(channels::build_ex2(1.2, 0.15, 0.15, 0.5), Thm2Config{L}, {0.1, 0.1, 0.1}),
              ErrorKind::ConfigMismatch);
}

TEST(Config, JsonRoundTripThroughEvaluate) {
  const auto ch = channels::build_ex1(0.1, 0.1, 0.1, 0.25);
  const RegionConfig cfg = ex1_config(0.25);
  const auto back = config_from_json(config_to_json(cfg));
  EXPECT_EQ(kind_of(back), EvaluatorKind::Thm1);
  const Rates r = {0.2, 0.1, 0.1};
  EXPECT_EQ(evaluate(ch, back, r).feasible, thm1_check(ch, ex1_config(0.25), r).feasible);
  EXPECT_KIND(evaluator_from_string("thm9"), ErrorKind::ParseError);
}

TEST(Slice, BoundaryPointsSitOnTheEdge) {
  const auto ch = channels::build_ex1(0.1, 0.1, 0.1, 0.25);
  const RegionConfig cfg = ex1_config(0.25);
  SliceSpec s;
  s.r3 = 0.1;
  s.rays = 5;
  s.tol = 1e-7;
  for (const auto& p : boundary_slice(ch, cfg, s)) {
    EXPECT_TRUE(evaluate(ch, cfg, {p.r1 * 0.999, p.r2 * 0.999, 0.1}).feasible);
    EXPECT_FALSE(evaluate(ch, cfg, {p.r1 + 1e-5 * std::cos(p.theta), p.r2 + 1e-5 * std::sin(p.theta), 0.1}).feasible);
  }
}
