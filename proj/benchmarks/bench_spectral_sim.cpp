#include <benchmark/benchmark.h>

#include "gfkchain/spectral_sim.hpp"

namespace {

void BM_AssembleModel(benchmark::State& state) {
  const auto params = gfkchain::sim::interpolate_params(0.5);
  const int elements = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gfkchain::sim::assemble_model(params, gfkchain::sim::DamageSpec{}, elements));
  }
}
BENCHMARK(BM_AssembleModel)->Arg(40)->Arg(160);

void BM_ModalSignature(benchmark::State& state) {
  const auto params = gfkchain::sim::interpolate_params(0.5);
  const int elements = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(gfkchain::sim::modal_signature(params, gfkchain::sim::DamageSpec{}, 15, elements));
  }
}
BENCHMARK(BM_ModalSignature)->Arg(40)->Arg(160)->Unit(benchmark::kMillisecond);

}  // namespace
