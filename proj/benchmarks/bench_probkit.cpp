#include <benchmark/benchmark.h>

#include "bcb/channel.hpp"
#include "bcb/probkit.hpp"
#include "bcb/rng.hpp"

using namespace bcb;

namespace {

JointPmf eight_var_fixture() {
  Rng rng(1);
  const JointPmf aux = JointPmf::random(
      {{"U", 2}, {"V", 2}, {"T", 2}, {"W1", 2}, {"W2", 2}, {"X", 2}}, rng);
  return attach_channel(aux, make_bsc_bc(0.1, 0.2));
}

void BM_Marginalize(benchmark::State& state) {
  const JointPmf p = eight_var_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(marginalize(p, {"U", "W1", "Y"}));
  }
}

void BM_Entropy(benchmark::State& state) {
  const JointPmf p = eight_var_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(entropy(p));
  }
}

void BM_CondMutualInfo(benchmark::State& state) {
  const JointPmf p = eight_var_fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cond_mutual_info(p, {"U"}, {"Y"}, {"T", "W1", "W2"}));
  }
}

void BM_AttachChannel(benchmark::State& state) {
  Rng rng(2);
  const JointPmf aux =
      JointPmf::random({{"U", 3}, {"V", 3}, {"W", 7}, {"X", 2}}, rng);
  const Channel ch = make_bsc_bc(0.1, 0.2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(attach_channel(aux, ch));
  }
}

}  // namespace

BENCHMARK(BM_Marginalize);
BENCHMARK(BM_Entropy);
BENCHMARK(BM_CondMutualInfo);
BENCHMARK(BM_AttachChannel);
