#include <random>

#include <benchmark/benchmark.h>

#include "gadkit/bases.hpp"
#include "gadkit/decomposition.hpp"
#include "gadkit/designs.hpp"
#include "gadkit/linalg.hpp"

using namespace gadkit;

namespace {

template <FieldScalar S>
Mat<S> gaussian(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Mat<S> out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      if constexpr (std::is_same_v<S, double>) {
        out(i, j) = normal(rng);
      } else {
        const double re = normal(rng);
        out(i, j) = Complex(re, normal(rng));
      }
    }
  return out;
}

template <FieldScalar S>
void BM_Svd(benchmark::State& state) {
  const Index n = state.range(0);
  const Mat<S> x = gaussian<S>(n, 2 * n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::svd(x));
}

template <FieldScalar S>
void BM_Pseudoinverse(benchmark::State& state) {
  const Index n = state.range(0);
  const Mat<S> x = gaussian<S>(n, n + n / 2, 2);
  for (auto _ : state) benchmark::DoNotOptimize(linalg::pseudoinverse(x));
}

// One m of an RFF sweep on the sphere, n = 100, budget 400.
void BM_SweepStep(benchmark::State& state) {
  bases::BasisSpec spec;
  spec.family = bases::Family::RandomFourierFeatures;
  spec.input_dim = 32;
  spec.column_budget = 400;
  designs::DesignParams params;
  params.strategy = designs::Strategy::SphereUniform;
  params.input_dim = 32;
  params.n = 100;
  params.grid_size = 400;
  const auto design = designs::make_design(params);
  const Matrix full = bases::Basis(spec).evaluate(design.all_points());
  designs::ParameterSpec theta;
  theta.length = 400;
  const RealVector th = designs::make_theta(theta);
  decomposition::SweepOptions options;
  options.range = {state.range(0), state.range(0), 1};
  for (auto _ : state) benchmark::DoNotOptimize(decomposition::sweep_matrix(full, 100, th, options));
}

void BM_ClusterEvaluate(benchmark::State& state) {
  bases::BasisSpec spec;
  spec.family = bases::Family::ClusterIsing;
  spec.input_dim = 10;
  spec.column_budget = 1024;
  spec.params.chain_length = 10;
  spec.ordering = bases::Ordering::PhysicalClusterOrder;
  const bases::Basis basis(spec);
  designs::DesignParams params;
  params.strategy = designs::Strategy::SpinConfigurations;
  params.input_dim = 10;
  params.n = 200;
  const auto points = designs::make_design(params).all_points();
  for (auto _ : state) benchmark::DoNotOptimize(basis.evaluate(points));
}

}  // namespace

BENCHMARK(BM_Svd<double>)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Svd<Complex>)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pseudoinverse<double>)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pseudoinverse<Complex>)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepStep)->Arg(50)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClusterEvaluate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
