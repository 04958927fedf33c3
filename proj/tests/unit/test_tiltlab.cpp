#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "cqrl/channels.hpp"
#include "cqrl/tiltlab.hpp"
#include "expect_kind.hpp"

using namespace cqrl;
using namespace cqrl::tiltlab;

namespace {

std::vector<int> random_dirs(const TiltSpace& s, Rng& rng, bool allow_absent) {
  std::vector<int> d;
  for (size_t b = 0; b < s.aux_dims.size(); ++b) {
    const auto size = static_cast<uint64_t>(s.block_size(static_cast<int>(b)));
    d.push_back(allow_absent && rng.bernoulli(0.2) ? -1 : static_cast<int>(rng.below(size)));
  }
  return d;
}

// Brute-force mean of V_d (ρ̄ ⊗ |0⟩⟨0|) V_d† over every direction tuple with
// block `kept` pinned to `kept_dir`.
Mat brute_average(const TiltSpace& s, const Mat& rho_bar, int kept, int kept_dir, double eta) {
  const int blocks = static_cast<int>(s.aux_dims.size());
  const Mat ground = embed_ground(s, rho_bar);
  Mat acc = Mat::Zero(s.extended_dim(), s.extended_dim());
  std::vector<int> dirs(static_cast<size_t>(blocks), 0);
  int count = 0;
  std::function<void(int)> rec = [&](int b) {
    if (b == blocks) {
      const Mat V = tilt_isometry(s, dirs, eta);
      // The isometry acts on the ground space; embed_ground already lives in
      // the extended space, so restrict to its ground block first.
      acc += V * ground.topLeftCorner(s.ground_dim(), s.ground_dim()) * V.adjoint();
      ++count;
      return;
    }
    if (b == kept) {
      dirs[static_cast<size_t>(b)] = kept_dir;
      rec(b + 1);
      return;
    }
    for (int d = 0; d < s.block_size(b); ++d) {
      dirs[static_cast<size_t>(b)] = d;
      rec(b + 1);
    }
  };
  rec(0);
  return acc / static_cast<double>(count);
}

}  // namespace

TEST(Tilt, IsometryOnThousandCases) {
  Rng rng(1);
  for (int c = 0; c < 1000; ++c) {
    const int base = 1 + static_cast<int>(rng.below(3));
    const auto s = TiltSpace::three_to_one(base, 1 + static_cast<int>(rng.below(3)), 1 + static_cast<int>(rng.below(3)),
                                           1 + static_cast<int>(rng.below(2)));
    const double eta = rng.uniform01();
    const Mat V = tilt_isometry(s, random_dirs(s, rng, true), eta);
    ASSERT_EQ(V.rows(), s.extended_dim());
    ASSERT_EQ(V.cols(), s.ground_dim());
    EXPECT_LT((V.adjoint() * V - Mat::Identity(s.ground_dim(), s.ground_dim())).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Tilt, FourUserIsometryUsesExactNormalization) {
  Rng rng(2);
  const auto s = TiltSpace::four_user(2, std::vector<int>(14, 2));
  const double eta = 0.3;
  EXPECT_NEAR(omega(s, eta), 1 + 4 * std::pow(eta, 2) + 6 * std::pow(eta, 4) + 4 * std::pow(eta, 6), 1e-15);
  EXPECT_NEAR(omega_printed(eta), 1 + 16 * std::pow(eta, 2) + 36 * std::pow(eta, 4) + 16 * std::pow(eta, 6), 1e-15);
  EXPECT_NEAR(omega_subset(2, eta), 1 + std::pow(eta, 4), 1e-15);
  const Mat V = tilt_isometry(s, random_dirs(s, rng, false), eta);
  EXPECT_LT((V.adjoint() * V - Mat::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Tilt, VectorMatchesHandConstruction) {
  Rng rng(3);
  const auto s = TiltSpace::three_to_one(2, 3, 2);
  const Vec h = random_unit(s.ground_dim(), rng);
  const double eta = 0.25;
  const std::vector<int> dirs = {2, 1};
  Vec expect = Vec::Zero(s.extended_dim());
  const double c = 1 / std::sqrt(1 + 2 * eta * eta);
  expect.head(s.ground_dim()) = c * h;
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < s.ground_dim(); ++i)
      expect(s.block_offset(b) + i * s.block_size(b) + dirs[static_cast<size_t>(b)]) = c * eta * h(i);
  EXPECT_LT((tilt_vector(s, h, dirs, eta) - expect).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(std::abs(h.dot(tilt_vector(s, h, dirs, eta).head(s.ground_dim()))), c, 1e-14);
  EXPECT_KIND(tilt_vector(s, 2.0 * h, dirs, eta), ErrorKind::NotUnit);
}

TEST(Tilt, ZeroEtaIsTheGroundEmbedding) {
  Rng rng(4);
  const auto s = TiltSpace::three_to_one(3, 2, 2);
  const Mat rho = random_density(3, rng);
  const auto t = tilt_state(s, rho, {1, 0}, 0.0);
  EXPECT_LT((t.op - embed_ground(s, rho)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(closeness(s, t), 0.0);
}

TEST(Tilt, PureCaseDistanceAndBounds) {
  Rng rng(5);
  const auto s = TiltSpace::three_to_one(2, 2, 2);
  for (double eta : {0.05, 0.1, 0.2, 0.5}) {
    const Vec v = random_unit(2, rng);
    const auto t = tilt_state(s, ketbra(v), {0, 1}, eta);
    const double c = 1 / std::sqrt(1 + 2 * eta * eta);
    const double d = closeness(s, t);
    EXPECT_NEAR(d, 2 * std::sqrt(1 - c * c), 1e-9);
    EXPECT_LE(d, pure_case_bound(eta) + 1e-12);
    EXPECT_LE(d, 4 * eta);
  }
  EXPECT_NEAR(pure_case_bound(0.1), 2 * std::sqrt(2 - 2 / std::sqrt(1.02)), 1e-15);
}

TEST(Smoothing, AnalyticAverageMatchesBruteForce) {
  Rng rng(6);
  const auto s = TiltSpace::three_to_one(2, 3, 2);
  const std::vector<Mat> fam = {random_density(2, rng), random_density(2, rng), random_density(2, rng)};
  const std::vector<double> w = {0.2, 0.5, 0.3};
  const Mat bar = w[0] * fam[0] + w[1] * fam[1] + w[2] * fam[2];
  const double eta = 0.3;
  const auto all = smoothing_residual(s, fam, w, -1, 0, eta);
  EXPECT_LT((all.average - brute_average(s, bar, -1, 0, eta)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((all.structured - embed_ground(s, bar) / omega(s, eta)).cwiseAbs().maxCoeff(), 1e-12);
  const auto kept = smoothing_residual(s, fam, w, 0, 1, eta);
  EXPECT_LT((kept.average - brute_average(s, bar, 0, 1, eta)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((kept.residual - (kept.average - kept.structured)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(kept.residual_norm, operator_norm(kept.residual), 1e-14);
  EXPECT_LE(kept.residual_norm, kept.bound_3);
}

TEST(Smoothing, SuitesStayWithinBounds) {
  for (const auto& c : smoothing_suite({2, 4, 8}, 0.2, 1)) EXPECT_TRUE(c.within_3) << c.aux;
  for (const auto& c : four_user_smoothing_suite({1, 2}, 0.2, 1)) EXPECT_TRUE(c.within_21) << c.aux;
}

TEST(HayashiNagaoka, KnownCasesAndValidation) {
  const Mat I = Mat::Identity(3, 3);
  auto r = hayashi_nagaoka_check(I, Mat::Zero(3, 3));
  EXPECT_TRUE(r.holds);
  EXPECT_GE(r.min_eig, -1e-12);
  // S = 0: the left side is I − 0 on supp T, so 2I + 4T − I ⪰ 0.
  r = hayashi_nagaoka_check(Mat::Zero(3, 3), I);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.min_eig, 5.0, 1e-12);
  EXPECT_KIND(hayashi_nagaoka_check(2.0 * I, Mat::Zero(3, 3)), ErrorKind::InvalidOperands);
  EXPECT_KIND(hayashi_nagaoka_check(I, -I), ErrorKind::InvalidOperands);
  for (const auto& c : hn_suite(40, 8, 3)) EXPECT_TRUE(c.pass);
}

TEST(Srm, TwoPureStatesReachHelstrom) {
  for (double phi : {0.3, 0.8, 1.4}) {
    const auto r = tiny_srm({channels::gamma_state(phi, 0), channels::gamma_state(phi, 1)}, {0.5, 0.5});
    EXPECT_NEAR(r.success, (1 + std::sin(phi)) / 2, 1e-9);
    EXPECT_LE(r.completeness_defect, 1e-9);
  }
  Rng rng(7);
  std::vector<Mat> basis;
  for (int i = 0; i < 3; ++i) basis.push_back(ketbra(Vec::Unit(3, i)));
  EXPECT_NEAR(tiny_srm(basis, {0.2, 0.3, 0.5}).success, 1.0, 1e-12);
  std::vector<Mat> many(17, random_density(2, rng));
  EXPECT_KIND(tiny_srm(many, std::vector<double>(17, 1.0 / 17)), ErrorKind::DimOverflow);
  EXPECT_KIND(tiny_srm(basis, {0.2, 0.2, 0.2}), ErrorKind::DomainError);
}

TEST(TiltSpace, Validation) {
  EXPECT_KIND(TiltSpace::three_to_one(8, 256, 256).validate(), ErrorKind::DimOverflow);
  EXPECT_KIND(TiltSpace::four_user(2, {1, 2}), ErrorKind::LengthMismatch);
  const auto s = TiltSpace::three_to_one(2, 2, 3, 2);
  EXPECT_EQ(s.extended_dim(), 4 + 4 * 4 + 4 * 9);
  EXPECT_KIND(tilt_isometry(s, {0, 9}, 0.1), ErrorKind::DomainError);
}
