// Serial reference kernel against the OpenMP ensemble kernel.

#include <benchmark/benchmark.h>

#include "hom/ensemble.hpp"
#include "hom/experiments.hpp"
#include "hom/trajectory.hpp"

namespace {

using namespace hom;

double herald_fidelity(const Protocol& protocol, RngStream& rng) {
  return summarize(run_protocol(protocol, rng)).fidelity;
}

void BM_ProtocolSerial(benchmark::State& state) {
  SystemParams p;
  p.hamiltonian = HamiltonianKind::kFull;
  const Protocol protocol(p, Sampler::kWaitingTime, false);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = run_ensemble_serial(n, 1, [&](RngStream& rng) { return herald_fidelity(protocol, rng); });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ProtocolParallel(benchmark::State& state) {
  SystemParams p;
  p.hamiltonian = HamiltonianKind::kFull;
  const Protocol protocol(p, Sampler::kWaitingTime, false);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto out = run_ensemble_parallel(n, 1, [&](RngStream& rng) { return herald_fidelity(protocol, rng); });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FixedStepTrajectory(benchmark::State& state) {
  SystemParams p;
  p.hamiltonian = HamiltonianKind::kFull;
  const Protocol protocol(p, Sampler::kFixedStep, false);
  std::uint64_t i = 0;
  for (auto _ : state) {
    RngStream rng(7, i++);
    benchmark::DoNotOptimize(herald_fidelity(protocol, rng));
  }
}

BENCHMARK(BM_ProtocolSerial)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProtocolParallel)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FixedStepTrajectory)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
