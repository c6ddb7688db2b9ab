#include <benchmark/benchmark.h>

#include "sqba/params.hpp"
#include "sqba/simnet/trial.hpp"

using namespace sqba;
using namespace sqba::simnet;

namespace {

void run(benchmark::State& state, Protocol proto, bool full, double eps, const char* adv) {
  TrialConfig c;
  c.protocol = proto;
  c.params = derive_params(static_cast<std::uint32_t>(state.range(0)), eps, 0.05, full);
  c.adversary = adv;
  c.inputs = InputRule::Split;
  std::uint64_t seed = 0, delivered = 0;
  for (auto _ : state) {
    const TrialReport r = run_trial(c, ++seed);
    delivered += r.net.deliveries;
  }
  state.counters["deliveries/s"] = benchmark::Counter(double(delivered), benchmark::Counter::kIsRate);
}

}  // namespace

static void BM_SharedCoinFifo(benchmark::State& s) { run(s, Protocol::SharedCoin, true, 1.0 / 3.0, "fifo"); }
BENCHMARK(BM_SharedCoinFifo)->Arg(64)->Arg(120)->Unit(benchmark::kMillisecond);

static void BM_SharedCoinRandom(benchmark::State& s) { run(s, Protocol::SharedCoin, false, 0.2, "uniform_random"); }
BENCHMARK(BM_SharedCoinRandom)->Arg(120)->Unit(benchmark::kMillisecond);

static void BM_WhpCoin(benchmark::State& s) { run(s, Protocol::WhpCoin, false, 0.2, "uniform_random"); }
BENCHMARK(BM_WhpCoin)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_Approver(benchmark::State& s) { run(s, Protocol::Approver, false, 0.2, "uniform_random"); }
BENCHMARK(BM_Approver)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_Agreement(benchmark::State& s) { run(s, Protocol::Agreement, false, 0.2, "uniform_random"); }
BENCHMARK(BM_Agreement)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);
