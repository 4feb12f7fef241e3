#include <benchmark/benchmark.h>

#include "bcb/channel.hpp"
#include "bcb/probkit.hpp"
#include "bcb/regions.hpp"
#include "bcb/rng.hpp"

using namespace bcb;

namespace {

JointPmf nj_fixture() {
  Rng rng(3);
  const JointPmf aux = JointPmf::random(
      {{"U", 2}, {"V", 2}, {"T", 2}, {"W1", 2}, {"W2", 2}, {"X", 2}}, rng);
  return attach_channel(aux, make_bsc_bc(0.1, 0.2));
}

JointPmf w_fixture() {
  Rng rng(4);
  const JointPmf aux =
      JointPmf::random({{"U", 3}, {"V", 3}, {"W", 7}, {"X", 2}}, rng);
  return attach_channel(aux, make_bsc_bc(0.1, 0.2));
}

void BM_NjPolytope(benchmark::State& state) {
  const JointPmf p = nj_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(nj_polytope(p));
  }
}

void BM_UvwPolytope(benchmark::State& state) {
  const JointPmf p = w_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(uvw_polytope(p));
  }
}

void BM_Vertices(benchmark::State& state) {
  const Polytope3 poly = nj_polytope(nj_fixture());
  for (auto _ : state) {
    benchmark::DoNotOptimize(vertices(poly));
  }
}

void BM_SupportValue(benchmark::State& state) {
  const Polytope3 poly = uvw_polytope(w_fixture());
  for (auto _ : state) {
    benchmark::DoNotOptimize(support_value(poly, {0.2, 0.5, 0.3}));
  }
}

void BM_Contains(benchmark::State& state) {
  const Polytope3 outer = uvw_polytope(w_fixture());
  const Polytope3 inner = bound2_polytope(w_fixture());
  for (auto _ : state) {
    benchmark::DoNotOptimize(contains(outer, inner));
  }
}

}  // namespace

BENCHMARK(BM_NjPolytope);
BENCHMARK(BM_UvwPolytope);
BENCHMARK(BM_Vertices);
BENCHMARK(BM_SupportValue);
BENCHMARK(BM_Contains);
