#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cqrl/cq_state.hpp"
#include "cqrl/linalg.hpp"
#include "cqrl/lp.hpp"
#include "cqrl/rng.hpp"
#include "cqrl/scalar.hpp"
#include "cqrl/tiltlab.hpp"
#include "cqrl/tolerances.hpp"
#include "expect_kind.hpp"

using namespace cqrl;

namespace {

Mat random_hermitian(int d, Rng& rng) {
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = cplx(rng.uniform01() - 0.5, rng.uniform01() - 0.5);
  return (a + a.adjoint()) / 2.0;
}

double eigen_entropy(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  double h = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-15) h -= l * std::log2(l);
  }
  return h;
}

}  // namespace

TEST(Linalg, JacobiMatchesEigenSolver) {
  Rng rng(1);
  for (int d = 1; d <= 12; ++d) {
    const Mat m = random_hermitian(d, rng);
    const auto es = eig_hermitian(m);
    Eigen::SelfAdjointEigenSolver<Mat> ref(m);
    for (int i = 0; i < d; ++i) EXPECT_NEAR(es.values(i), ref.eigenvalues()(d - 1 - i), 1e-10);
    const Mat back = es.vectors * es.values.cast<cplx>().asDiagonal() * es.vectors.adjoint();
    EXPECT_LT((back - m).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((es.vectors.adjoint() * es.vectors - Mat::Identity(d, d)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Linalg, JacobiIsBitIdenticalAcrossCalls) {
  Rng rng(2);
  const Mat m = random_hermitian(9, rng);
  const auto a = eig_hermitian(m), b = eig_hermitian(m);
  EXPECT_EQ(a.values, b.values);
  EXPECT_TRUE(a.vectors == b.vectors);
}

TEST(Linalg, RejectsNonHermitian) {
  Mat m = Mat::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_KIND(eig_hermitian(m), ErrorKind::NotHermitian);
}

TEST(Linalg, PartialTraceOfProduct) {
  Rng rng(3);
  const Mat a = tiltlab::random_density(2, rng), b = tiltlab::random_density(3, rng), c = tiltlab::random_density(2, rng);
  const Mat abc = tensor(tensor(a, b), c);
  EXPECT_LT((partial_trace(abc, {2, 3, 2}, {0}) - a).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((partial_trace(abc, {2, 3, 2}, {1}) - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((partial_trace(abc, {2, 3, 2}, {2, 0}) - tensor(a, c)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_KIND(partial_trace(abc, {2, 2, 2}, {0}), ErrorKind::DimensionMismatch);
}

TEST(Linalg, PartialTraceOfEntangledPureStateIsMixed) {
  Vec bell = Vec::Zero(4);
  bell(0) = bell(3) = 1 / std::sqrt(2.0);
  const Mat r = partial_trace(ketbra(bell), {2, 2}, {1});
  EXPECT_LT((r - Mat::Identity(2, 2) / 2.0).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(entropy_bits(r), 1.0, 1e-12);
}

TEST(Linalg, TraceNormOfDifferenceOfPureStates) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const Vec a = tiltlab::random_unit(3, rng), b = tiltlab::random_unit(3, rng);
    const double overlap = std::norm(a.dot(b));
    EXPECT_NEAR(trace_norm(ketbra(a) - ketbra(b)), 2 * std::sqrt(1 - overlap), 1e-10);
  }
}

TEST(Linalg, EntropyMatchesIndependentSpectrum) {
  Rng rng(5);
  for (int d = 1; d <= 8; ++d) {
    const Mat rho = tiltlab::random_density(d, rng);
    EXPECT_NEAR(von_neumann_entropy(DensityOperator(rho)), eigen_entropy(rho), 1e-10);
  }
  EXPECT_NEAR(von_neumann_entropy(DensityOperator::diag({0.5, 0.25, 0.25})), 1.5, 1e-14);
}

TEST(Linalg, DensityOperatorValidation) {
  EXPECT_KIND(DensityOperator(Mat::Identity(2, 2)), ErrorKind::InvalidState);
  Mat neg = Mat::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_KIND(DensityOperator{neg}, ErrorKind::InvalidState);
  Vec v = Vec::Zero(2);
  v(0) = 2.0;
  EXPECT_KIND(DensityOperator::pure(v), ErrorKind::InvalidState);
}

TEST(Scalar, BinaryEntropyAndFact1) {
  EXPECT_DOUBLE_EQ(binary_entropy(0.5), 1.0);
  EXPECT_DOUBLE_EQ(binary_entropy(0.0), 0.0);
  EXPECT_NEAR(binary_entropy(0.11), 0.499915958164528, 1e-12);
  EXPECT_KIND(binary_entropy(1.5), ErrorKind::DomainError);
  EXPECT_DOUBLE_EQ(binary_convolve(0.1, 0.2), 0.1 * 0.8 + 0.9 * 0.2);
  // f(t) is the top eigenvalue of (1 − t)|0⟩⟨0| + t|v_φ⟩⟨v_φ|.
  for (double phi : {0.1, 0.7, 1.2, std::numbers::pi / 2})
    for (double t : {0.0, 0.1, 0.35, 0.5, 0.9}) {
      Vec v(2);
      v << std::cos(phi), std::sin(phi);
      Mat m = (1 - t) * ketbra(Vec::Unit(2, 0)) + t * ketbra(v);
      Eigen::SelfAdjointEigenSolver<Mat> es(m);
      EXPECT_NEAR(fact1_f(t, phi), es.eigenvalues()(1), 1e-13);
    }
}

TEST(CqState, EntropiesMatchJointOperator) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    CqState s({{"A", 2}, {"B", 3}}, 2);
    std::vector<int> ops;
    for (int i = 0; i < 3; ++i) ops.push_back(s.add_operator(tiltlab::random_density(2, rng)));
    std::vector<double> p(6);
    double tot = 0;
    for (auto& x : p) tot += (x = rng.uniform01());
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 3; ++b) s.add_point({a, b}, p[static_cast<size_t>(a * 3 + b)] / tot, ops[static_cast<size_t>((a + b) % 3)]);
    EXPECT_NEAR(s.total_mass(), 1.0, 1e-12);
    const double joint = eigen_entropy(s.joint_operator());
    EXPECT_NEAR(s.entropy({{"A", "B"}, true}), joint, 1e-10);
    // H(A,B,Y) = H(A,B) + Σ p H(ρ_ab)
    double ab = 0, cond = 0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 3; ++b) {
        const double q = p[static_cast<size_t>(a * 3 + b)] / tot;
        ab -= q * std::log2(q);
      }
    cond = joint - ab;
    EXPECT_NEAR(s.entropy({{"A", "B"}, false}), ab, 1e-12);
    EXPECT_GE(cond, -1e-12);
    // Chain rule: I(A;Y|B) = H(A|B) − H(A|B,Y) and symmetry of I(A;B).
    const EntropyQuery A{{"A"}, false}, B{{"B"}, false}, Y{{}, true};
    EXPECT_NEAR(mutual_info(s, A, B), mutual_info(s, B, A), 1e-12);
    EXPECT_NEAR(conditional_mutual_info(s, A, Y, B) + mutual_info(s, B, Y),
                mutual_info(s, {{"A", "B"}, false}, Y), 1e-10);
    EXPECT_GE(conditional_mutual_info(s, A, Y, B), -1e-10);
  }
}

TEST(CqState, Errors) {
  CqState s({{"A", 2}}, 2);
  EXPECT_KIND(s.register_index("Z"), ErrorKind::UnknownRegister);
  EXPECT_KIND(s.add_operator(Mat::Identity(3, 3) / 3.0), ErrorKind::DimensionMismatch);
  const int o = s.add_operator(Mat::Identity(2, 2) / 2.0);
  EXPECT_KIND(s.add_point({2}, 0.5, o), ErrorKind::DomainError);
  EXPECT_KIND(mutual_info(s, {{"A"}, false}, {{"A"}, false}), ErrorKind::OverlappingQueries);
  EXPECT_KIND(CqState({{"A", 2}, {"A", 2}}, 2), ErrorKind::ConfigMismatch);
  EXPECT_KIND(Pmf({0.5, 0.6}), ErrorKind::InvalidState);
}

TEST(Tolerances, ParseAndRestore) {
  const Tolerances t = parse_tolerances("rate=1e-6,herm=1e-7");
  EXPECT_DOUBLE_EQ(t.rate, 1e-6);
  EXPECT_DOUBLE_EQ(t.herm, 1e-7);
  EXPECT_DOUBLE_EQ(t.psd, 1e-9);
  const Tolerances all = parse_tolerances("all=1e-5");
  EXPECT_DOUBLE_EQ(all.prob, 1e-5);
  EXPECT_KIND(parse_tolerances("bogus=1"), ErrorKind::ParseError);
  EXPECT_KIND(parse_tolerances("rate"), ErrorKind::ParseError);
  EXPECT_KIND(parse_tolerances("rate=abc"), ErrorKind::ParseError);
}

TEST(Rng, DeterministicStreams) {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
  Rng s1 = Rng::stream(7, 3), s2 = Rng::stream(7, 3), s3 = Rng::stream(7, 4);
  EXPECT_EQ(s1.next(), s2.next());
  EXPECT_NE(Rng::stream(7, 3).next(), s3.next());
  Rng r(9);
  std::vector<int> counts(5, 0);
  for (int i = 0; i < 50000; ++i) {
    const auto v = r.below(5);
    ASSERT_LT(v, 5u);
    ++counts[v];
  }
  for (int c : counts) EXPECT_NEAR(c / 50000.0, 0.2, 0.01);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Lp, FeasibleAndInfeasibleSystems) {
  using S = LinearConstraint::Sense;
  // x + y < 1, x > 0.3, y > 0.3: feasible.
  std::vector<LinearConstraint> rows = {{"sum", {1, 1}, S::Less, 1.0, true},
                                        {"x", {1, 0}, S::Greater, 0.3, true},
                                        {"y", {0, 1}, S::Greater, 0.3, true}};
  auto r = lp_feasible(2, rows, 1e-9, 1e-8);
  ASSERT_TRUE(r.feasible);
  EXPECT_LT(r.x[0] + r.x[1], 1.0);
  EXPECT_GT(r.x[0], 0.3);
  EXPECT_GT(r.x[1], 0.3);
  // Tighten to x, y > 0.5: infeasible.
  rows[1].rhs = rows[2].rhs = 0.5;
  EXPECT_FALSE(lp_feasible(2, rows, 1e-9, 1e-8).feasible);
  // Strict boundary: x < 1 and x > 1 has no solution, x ≤ 1 and x ≥ 1 does.
  std::vector<LinearConstraint> edge = {{"a", {1}, S::Less, 1.0, true}, {"b", {1}, S::Greater, 1.0, true}};
  EXPECT_FALSE(lp_feasible(1, edge, 1e-9, 1e-8).feasible);
  edge[0].strict = edge[1].strict = false;
  EXPECT_TRUE(lp_feasible(1, edge, 1e-9, 1e-8).feasible);
  std::vector<LinearConstraint> eq = {{"e", {1, -2}, S::Equal, 0.0, false}, {"g", {0, 1}, S::Greater, 0.25, false}};
  r = lp_feasible(2, eq, 1e-9, 1e-8);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.x[0], 2 * r.x[1], 1e-8);
  EXPECT_KIND(lp_feasible(3, eq, 1e-9, 1e-8), ErrorKind::DimensionMismatch);
}
