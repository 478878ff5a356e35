#include <benchmark/benchmark.h>

#include <cmath>

#include "mespec/evolution.hpp"
#include "mespec/secular.hpp"
#include "mespec/spectral_basis.hpp"
#include "mespec/truncated_model.hpp"

namespace {

using namespace mespec;

LevelSpec reference_spec() { return LevelSpec::affine(1.0, 0.0, 2.0, 0.4, 1.0); }

void BM_AssembleModel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    TruncatedModel model(reference_spec(), n);
    benchmark::DoNotOptimize(model.generator().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleModel)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_SolveSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TruncatedModel model(reference_spec(), n);
  const SecularContext ctx = SecularContext::for_view(model.view());
  for (auto _ : state) {
    Spectrum spectrum = solve_spectrum(ctx);
    benchmark::DoNotOptimize(spectrum.trace_check);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveSpectrum)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_BuildBasis(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TruncatedModel model(reference_spec(), n);
  const Spectrum spectrum = solve_spectrum(SecularContext::for_view(model.view()));
  for (auto _ : state) {
    BiorthogonalSystem system = BiorthogonalSystem::build(model.view(), spectrum);
    benchmark::DoNotOptimize(system.size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildBasis)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_SpectralPropagate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TruncatedModel model(reference_spec(), n);
  const Spectrum spectrum = solve_spectrum(SecularContext::for_view(model.view()));
  const BiorthogonalSystem system = BiorthogonalSystem::build(model.view(), spectrum);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n);
  e1(0) = 1.0;
  const ProbabilityVector p0 = ProbabilityVector::strict(std::move(e1));
  const std::vector<double> taus = uniform_grid(10.0, 21);
  for (auto _ : state) {
    Trajectory t = spectral_propagate(system, spectrum, p0, taus);
    benchmark::DoNotOptimize(t.states.back().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpectralPropagate)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_OdePropagate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const TruncatedModel model(reference_spec(), n);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(n);
  e1(0) = 1.0;
  const ProbabilityVector p0 = ProbabilityVector::strict(std::move(e1));
  const std::vector<double> taus = uniform_grid(10.0, 21);
  for (auto _ : state) {
    Trajectory t = ode_propagate(model.generator(), p0, taus, 1e-10);
    benchmark::DoNotOptimize(t.states.back().data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_OdePropagate)->RangeMultiplier(2)->Range(16, 64)->Complexity();

}  // namespace

BENCHMARK_MAIN();
