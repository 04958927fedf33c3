#include <benchmark/benchmark.h>

#include "cqrl/channels.hpp"
#include "cqrl/cq_state.hpp"
#include "cqrl/gf.hpp"
#include "cqrl/linalg.hpp"
#include "cqrl/mcsim.hpp"
#include "cqrl/regions.hpp"
#include "cqrl/tiltlab.hpp"

using namespace cqrl;

static void BM_EigHermitian(benchmark::State& state) {
  Rng rng(1);
  const Mat m = tiltlab::random_density(static_cast<int>(state.range(0)), rng);
  for (auto _ : state) benchmark::DoNotOptimize(eig_hermitian(m));
}
BENCHMARK(BM_EigHermitian)->Arg(4)->Arg(16)->Arg(64);

static void BM_CqStateEntropy(benchmark::State& state) {
  const auto ch = channels::build_ex2(1.2, 0.15, 0.15, 0.125);
  const auto& d = ch.output_dims();
  CqState s({{"X1", 2}, {"X2", 2}, {"X3", 2}}, d[0] * d[1] * d[2], "Y");
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c) s.add_point({a, b, c}, 0.125, s.add_operator(ch.state(a, b, c)));
  for (auto _ : state) benchmark::DoNotOptimize(s.entropy({{"X1"}, true}));
}
BENCHMARK(BM_CqStateEntropy);

static void BM_Thm1Check(benchmark::State& state) {
  const auto ch = channels::build_ex2(1.2, 0.15, 0.15, 0.125);
  regions::Thm1Config c;
  c.field = 2;
  c.p_x1 = Pmf({0.875, 0.125});
  c.p_u2 = Pmf::uniform(2);
  c.p_u3 = Pmf::uniform(2);
  c.f2 = {0, 1};
  c.f3 = {0, 1};
  for (auto _ : state) benchmark::DoNotOptimize(regions::thm1_check(ch, c, {0.3, 0.3, 0.3}));
}
BENCHMARK(BM_Thm1Check);

static void BM_LikelihoodEncode(benchmark::State& state) {
  const auto code = gf::random_nested_code(static_cast<int>(state.range(0)), 4, 2, 2, 3);
  const gf::Vector m = {1, 0};
  const std::vector<double> p = {0.8, 0.2};
  Rng rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(mcsim::likelihood_encode(code, m, p, rng));
}
BENCHMARK(BM_LikelihoodEncode)->Arg(8)->Arg(16);

static void BM_TiltIsometry(benchmark::State& state) {
  const auto s = tiltlab::TiltSpace::three_to_one(4, 4, 4);
  for (auto _ : state) benchmark::DoNotOptimize(tiltlab::tilt_isometry(s, {1, 2}, 0.1));
}
BENCHMARK(BM_TiltIsometry);

static void BM_SmallScan(benchmark::State& state) {
  const auto ch = channels::build_ex2(1.2, 0.15, 0.15, 0.125);
  regions::GridSpec g;
  g.denominator = 4;
  g.max_aux = 2;
  for (auto _ : state)
    benchmark::DoNotOptimize(regions::max_r1_scan(ch, regions::EvaluatorKind::Unstructured, 0.3, 0.3, g));
}
BENCHMARK(BM_SmallScan)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
