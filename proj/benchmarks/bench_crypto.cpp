#include <benchmark/benchmark.h>

#include <array>

#include "sqba/crypto_sim.hpp"
#include "sqba/params.hpp"

using namespace sqba;

static void BM_RegistrySetup(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(setup_registry(n, ++seed));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_RegistrySetup)->Arg(1000)->Arg(10000);

static void BM_VrfEval(benchmark::State& state) {
  const Registry reg = setup_registry(64, 1);
  std::array<std::uint8_t, 16> in{};
  for (auto _ : state) {
    ++in[0];
    benchmark::DoNotOptimize(vrf_eval(reg, 3, in));
  }
}
BENCHMARK(BM_VrfEval);

static void BM_VrfVerify(benchmark::State& state) {
  const Registry reg = setup_registry(64, 1);
  const std::array<std::uint8_t, 16> in{1, 2, 3};
  const VrfOutput out = vrf_eval(reg, 3, in);
  for (auto _ : state) benchmark::DoNotOptimize(vrf_verify(reg, 3, in, out));
}
BENCHMARK(BM_VrfVerify);

static void BM_CommitteeVal(benchmark::State& state) {
  const Registry reg = setup_registry(1000, 1);
  const std::array<std::uint8_t, 12> s{9, 9, 9};
  const double lambda = committee_lambda(1000);
  const SampleProof p = sample(reg, 5, s, lambda);
  for (auto _ : state) benchmark::DoNotOptimize(committee_val(reg, s, lambda, 5, p.proof));
}
BENCHMARK(BM_CommitteeVal);

static void BM_SignVerify(benchmark::State& state) {
  const Registry reg = setup_registry(64, 1);
  std::array<std::uint8_t, 24> payload{};
  for (auto _ : state) {
    ++payload[0];
    const Signature sig = sign(reg, 7, payload);
    benchmark::DoNotOptimize(verify_sig(reg, sig, payload));
  }
}
BENCHMARK(BM_SignVerify);
