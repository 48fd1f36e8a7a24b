#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "simplexmc/fixtures.hpp"
#include "simplexmc/meanfield.hpp"
#include "simplexmc/projection.hpp"
#include "simplexmc/semigroup.hpp"

using namespace simplexmc;

namespace {

GeneratorMatrix cycle_generator(int k) {
  std::vector<double> rates(static_cast<std::size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) {
    int j = (i + 1) % k;
    rates[static_cast<std::size_t>(i) * k + j] = 1.0 + 0.25 * i;
    rates[static_cast<std::size_t>(i) * k + i] = -(1.0 + 0.25 * i);
  }
  return GeneratorMatrix(k, rates);
}

SimplexPoint spread_point(int k, std::uint64_t salt) {
  std::vector<double> w(static_cast<std::size_t>(k));
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += w[static_cast<std::size_t>(i)] = 1.0 + ((i + salt) % 5);
  for (double& x : w) x /= sum;
  return SimplexPoint(w);
}

const EnsemblePath& cached_ensemble() {
  static EnsemblePath e =
      simulate_finite(glauber_field(IsingParams{0.5, 0.0, 1.0}), 2000,
                      SimplexPoint({0.5, 0.5}), 2.0, 17);
  return e;
}

void bench_matrix_exp(benchmark::State& state) {
  GeneratorMatrix r = cycle_generator(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(matrix_exp(r, 0.8));
  }
}

void bench_jump_transport(benchmark::State& state) {
  int k = static_cast<int>(state.range(0));
  SimplexPoint y = spread_point(k, 0), y2 = spread_point(k, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(jump_transport_matrix(y, y2));
  }
}

void bench_transport_linear(benchmark::State& state) {
  int k = static_cast<int>(state.range(0));
  SimplexPoint y = spread_point(k, 0), y2 = spread_point(k, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(transport_linear(y, y2));
  }
}

void bench_build_semigroup(benchmark::State& state) {
  SimplexPath p = fixture_path_corpus()[6].path;
  int cells = static_cast<int>(state.range(0));
  std::vector<double> grid;
  for (int i = 0; i <= cells; ++i) grid.push_back(static_cast<double>(i) / cells);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_minimal_semigroup(p, grid));
  }
}

void bench_simulate_finite(benchmark::State& state) {
  RateField field = glauber_field(IsingParams{0.5, 0.0, 1.0});
  SimplexPoint y0({0.5, 0.5});
  int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_finite(field, n, y0, 1.0, 11));
  }
}

void bench_project(benchmark::State& state) {
  const EnsemblePath& e = cached_ensemble();
  std::vector<double> times;
  for (int i = 0; i <= 100; ++i) times.push_back(2.0 * i / 100);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project(e, times));
  }
}

void bench_mass_transfer(benchmark::State& state) {
  const EnsemblePath& e = cached_ensemble();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mass_transfer(e, 0.0, 2.0));
  }
}

}  // namespace

BENCHMARK(bench_matrix_exp)->Arg(2)->Arg(4)->Arg(8);
BENCHMARK(bench_jump_transport)->Arg(3)->Arg(8);
BENCHMARK(bench_transport_linear)->Arg(3)->Arg(8)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_build_semigroup)->Arg(8)->Arg(64)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_simulate_finite)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_project)->Unit(benchmark::kMicrosecond);
BENCHMARK(bench_mass_transfer)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
