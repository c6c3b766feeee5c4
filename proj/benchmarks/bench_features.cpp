#include <benchmark/benchmark.h>

#include "symkern/features.hpp"
#include "symkern/oracles.hpp"

using namespace symkern;

namespace {

KernelSpec heat_spec(double kappa) {
  KernelSpec s;
  s.kappa = kappa;
  return s;
}

SpaceId space_from_range(const benchmark::State& state) {
  return state.range(0) > 0
             ? SpaceId{Space::hyperbolic, static_cast<int>(state.range(0))}
             : SpaceId{Space::spd, static_cast<int>(-state.range(0))};
}

}  // namespace

static void BM_RejectionSample(benchmark::State& state) {
  const SpaceId space = space_from_range(state);
  const auto spec = heat_spec(1.0);
  Rng rng(1);
  for (auto _ : state) {
    if (space.kind == Space::hyperbolic) {
      benchmark::DoNotOptimize(rejection_sample_hyp(spec, space.dim, rng));
    } else {
      benchmark::DoNotOptimize(rejection_sample_spd(spec, space.dim, rng));
    }
  }
}
BENCHMARK(BM_RejectionSample)->Arg(2)->Arg(3)->Arg(8)->Arg(-2)->Arg(-3);

static void BM_BuildBasis(benchmark::State& state) {
  const SpaceId space = space_from_range(state);
  const auto spec = heat_spec(1.0);
  Rng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        build_basis(spec, space, 1024, SamplingMethod::rejection, rng));
  }
}
BENCHMARK(BM_BuildBasis)->Arg(2)->Arg(8)->Arg(-2);

static void BM_FeatureMap(benchmark::State& state) {
  const SpaceId space = space_from_range(state);
  Rng rng(3);
  const auto basis =
      build_basis(heat_spec(1.0), space, 8192, SamplingMethod::rejection, rng);
  const auto x = act(random_isometry(space, rng), base_point(space));
  for (auto _ : state) {
    benchmark::DoNotOptimize(feature_map(basis, x));
  }
}
BENCHMARK(BM_FeatureMap)->Arg(2)->Arg(8)->Arg(-2)->Arg(-3);

static void BM_IwasawaSo1n(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  const auto g = random_isometry({Space::hyperbolic, n}, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iwasawa_so1n(g));
  }
}
BENCHMARK(BM_IwasawaSo1n)->Arg(2)->Arg(8);

static void BM_RqDecompose(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(5);
  Eigen::MatrixXd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(rq_decompose(m));
  }
}
BENCHMARK(BM_RqDecompose)->Arg(2)->Arg(3)->Arg(8);

static void BM_HeatSpd2Oracle(benchmark::State& state) {
  Eigen::MatrixXd s1(2, 2);
  s1 << 1.85, 0.52, 0.52, 0.8;
  const SpdPoint x = spd_identity(2);
  const SpdPoint y{s1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(heat_spd2(x, y, 1.0));
  }
}
BENCHMARK(BM_HeatSpd2Oracle);

BENCHMARK_MAIN();
