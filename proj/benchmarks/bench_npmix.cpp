#include <benchmark/benchmark.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "npmix/bootstrap.hpp"
#include "npmix/estimator.hpp"
#include "npmix/functional.hpp"
#include "npmix/pipeline.hpp"

namespace {

using namespace npmix;

// AR(1) rows with monotone dropout after each time with probability 0.25.
ObservedSample dropout_sample(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> z;
  std::uniform_real_distribution<double> u;
  std::vector<double> values;
  values.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t T = 1;
    while (T < d && (i < d ? T < i + 1 : u(gen) >= 0.25)) ++T;
    double e = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      e = j == 0 ? z(gen) : 0.6 * e + 0.8 * z(gen);
      values.push_back(j < T ? static_cast<double>(j) + e
                             : std::numeric_limits<double>::quiet_NaN());
    }
  }
  return ObservedSample::continuous(d, std::move(values));
}

void BM_DonorWeights(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sample = dropout_sample(n, 3, 1);
  const auto kernels = compute_bandwidths(sample, {});
  std::vector<std::size_t> donors;
  for (std::size_t i = 0; i < n; ++i) {
    if (sample.pattern(i).complete()) donors.push_back(i);
  }
  const std::vector<std::size_t> prefix{0, 1};
  const std::vector<double> point{0.2, 1.1, 0.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(donor_weights(sample, prefix, point, donors, kernels));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(donors.size()));
}
BENCHMARK(BM_DonorWeights)->Arg(300)->Arg(3000)->Arg(30000);

void BM_CompleteSample(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto V = static_cast<std::size_t>(state.range(1));
  const auto sample = dropout_sample(n, 4, 2);
  const auto kernels = compute_bandwidths(sample, {});
  const Restriction ac(MonotoneRestriction::ac(), "AC");
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(complete_sample(sample, ac, V, kernels, ++seed));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * V));
}
BENCHMARK(BM_CompleteSample)->Args({300, 100})->Args({1000, 20})->Args({4000, 10})
    ->Unit(benchmark::kMillisecond);

void BM_BootstrapReplicate(benchmark::State& state) {
  const auto sample = dropout_sample(300, 3, 3);
  const EstimationSetup setup{Restriction(MonotoneRestriction::ac(), "AC"), {},
                              BandwidthPolicy::Recompute, 100, std::nullopt, 1};
  const std::vector<Functional> functionals{Functional::mean("X3")};
  std::size_t b = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_replicate(sample, setup, functionals, 9, b++));
  }
}
BENCHMARK(BM_BootstrapReplicate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
