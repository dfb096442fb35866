// Serial reference vs OpenMP kernels. Arguments: worker count (parallel only).
#include <benchmark/benchmark.h>

#include "nhse/eig.hpp"
#include "nhse/model.hpp"
#include "nhse/observables.hpp"
#include "nhse/sweep.hpp"

namespace {

nhse::ModelParams ladder(std::size_t cells, std::size_t particles) {
  nhse::ModelParams p;
  p.cells = cells;
  p.particles = particles;
  p.u = 16.0;
  p.mu = 4.0;
  p.j_p = 0.01;
  return p;
}

void BM_AssemblySerial(benchmark::State& state) {
  const auto p = ladder(12, 3);
  const auto basis = nhse::Basis::enumerate(p.cells, p.particles, p.statistics);
  for (auto _ : state) benchmark::DoNotOptimize(nhse::build_hamiltonian_serial(p, basis));
  state.counters["dim"] = static_cast<double>(basis.dimension());
}

void BM_AssemblyParallel(benchmark::State& state) {
  const auto p = ladder(12, 3);
  const auto basis = nhse::Basis::enumerate(p.cells, p.particles, p.statistics);
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nhse::build_hamiltonian(p, basis, workers));
}

struct Solved {
  nhse::Basis basis;
  nhse::SpectrumResult spectrum;
};

const Solved& solved() {
  static const Solved s = [] {
    const auto p = ladder(12, 2);
    auto basis = nhse::Basis::enumerate(p.cells, p.particles, p.statistics);
    auto spectrum = nhse::eigendecompose(nhse::build_hamiltonian(p, basis));
    return Solved{std::move(basis), std::move(spectrum)};
  }();
  return s;
}

void BM_SummariesSerial(benchmark::State& state) {
  const auto& s = solved();
  for (auto _ : state) benchmark::DoNotOptimize(nhse::summarize_states_serial(s.spectrum, s.basis));
}

void BM_SummariesParallel(benchmark::State& state) {
  const auto& s = solved();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nhse::summarize_states(s.spectrum, s.basis, workers));
  }
}

nhse::SweepSpec sweep_spec() {
  nhse::SweepSpec spec;
  spec.base = ladder(6, 2);
  spec.axes = {nhse::parse_axis("mu:0:4:4"), nhse::parse_axis("u:4:16:4")};
  spec.observables = {nhse::SweepObservable::MaxImGlobal, nhse::SweepObservable::NcorOfMaxIm};
  return spec;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto spec = sweep_spec();
  for (auto _ : state) benchmark::DoNotOptimize(nhse::run_sweep_serial(spec));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto spec = sweep_spec();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nhse::run_sweep(spec, workers));
}

}  // namespace

BENCHMARK(BM_AssemblySerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssemblyParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SummariesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SummariesParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
