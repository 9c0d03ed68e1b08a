#include <benchmark/benchmark.h>

#include <random>

#include "gfkchain/geodesic_kernel.hpp"
#include "gfkchain/subspace.hpp"

namespace {

Eigen::MatrixXd random_basis(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (auto& v : m.reshaped()) v = n(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

gfkchain::subspace::FlowDecomposition decomposition(int d) {
  std::mt19937_64 rng(11);
  return gfkchain::subspace::principal_decomposition(
      gfkchain::subspace::SubspaceBasis(random_basis(15, d, rng)),
      gfkchain::subspace::SubspaceBasis(random_basis(15, d, rng)));
}

void BM_PrincipalDecomposition(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const gfkchain::subspace::SubspaceBasis s1(random_basis(15, d, rng));
  const gfkchain::subspace::SubspaceBasis s2(random_basis(15, d, rng));
  for (auto _ : state) benchmark::DoNotOptimize(gfkchain::subspace::principal_decomposition(s1, s2));
}
BENCHMARK(BM_PrincipalDecomposition)->DenseRange(1, 7, 3);

void BM_GfkMatrix(benchmark::State& state) {
  const auto dec = decomposition(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gfkchain::gfk::gfk_matrix(dec));
}
BENCHMARK(BM_GfkMatrix)->DenseRange(1, 7, 3);

void BM_QuadratureOracle(benchmark::State& state) {
  const auto dec = decomposition(4);
  const int steps = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gfkchain::gfk::quadrature_oracle(dec, steps));
}
BENCHMARK(BM_QuadratureOracle)->Arg(100)->Arg(10000);

void BM_Gram(benchmark::State& state) {
  const auto g = gfkchain::gfk::gfk_matrix(decomposition(4));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(state.range(0), 15);
  for (auto _ : state) benchmark::DoNotOptimize(gfkchain::gfk::gram(g, x, x));
}
BENCHMARK(BM_Gram)->Arg(200)->Arg(1000);

}  // namespace
