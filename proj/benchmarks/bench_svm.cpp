#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "gfkchain/svm.hpp"

namespace {

void BM_SvmTrain(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise;
  Eigen::MatrixXd x(n, 15);
  std::vector<gfkchain::svm::Label> y(n);
  for (int i = 0; i < n; ++i) {
    const bool healthy = i < n / 2;
    y[i] = healthy ? gfkchain::svm::Label::healthy : gfkchain::svm::Label::damaged;
    for (int j = 0; j < 15; ++j) x(i, j) = noise(rng) + (healthy ? 0.5 : -0.5);
  }
  const Eigen::MatrixXd gram = x * x.transpose();
  for (auto _ : state) benchmark::DoNotOptimize(gfkchain::svm::train(gram, y));
}
BENCHMARK(BM_SvmTrain)->Arg(50)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace
