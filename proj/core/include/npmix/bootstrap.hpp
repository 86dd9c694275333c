#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "npmix/functional.hpp"
#include "npmix/pipeline.hpp"
#include "npmix/rng.hpp"
#include "npmix/sample.hpp"

namespace npmix {

// Substream coordinates: replicate b resamples with
// derive_seed(seed, kResampleStream, b) and completes with
// derive_seed(seed, kCompleteStream, b).
inline constexpr std::uint64_t kResampleStream = 0x7265'7361'6d70'6c65ULL;
inline constexpr std::uint64_t kCompleteStream = 0x636f'6d70'6c65'7465ULL;

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

struct BootstrapResult {
  std::string functional;
  std::string restriction;
  double point = 0.0;
  Interval interval;
  double alpha = 0.05;
  std::size_t B = 0;
  std::size_t V = 0;
  std::uint64_t seed = 0;
  // Successful replicate values in replicate order.
  std::vector<double> replicates;
  // Replicate indices (0-based) that could not be estimated.
  std::vector<std::size_t> failed;
};

// n row indices drawn uniformly with replacement.
std::vector<std::size_t> resample_indices(std::size_t n, Rng& rng);
ObservedSample resample(const ObservedSample& sample, Rng& rng);

// [Γ̂⁻¹(α/2), Γ̂⁻¹(1-α/2)] with Γ̂⁻¹(p) the smallest replicate t whose
// empirical CDF k/B reaches p.
Interval percentile_interval(std::span<const double> replicates, double alpha);

struct BootstrapOptions {
  std::size_t B = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // Abort when more than this fraction of replicates fail.
  double max_failure_fraction = 0.01;
};

// Point estimate on the original sample (completion seed = options.seed)
// plus B replicates. Each replicate depends only on (data, setup, seed, b).
std::vector<BootstrapResult> run_bootstrap(const ObservedSample& sample,
                                           const EstimationSetup& setup,
                                           const std::vector<Functional>& functionals,
                                           const BootstrapOptions& options);

BootstrapResult run_bootstrap(const ObservedSample& sample, const EstimationSetup& setup,
                              const Functional& functional, const BootstrapOptions& options);

// Value of replicate b alone (throws if it fails).
std::vector<double> bootstrap_replicate(const ObservedSample& sample,
                                        const EstimationSetup& setup,
                                        const std::vector<Functional>& functionals,
                                        std::uint64_t seed, std::size_t b,
                                        const StratumBandwidths* frozen = nullptr);

}  // namespace npmix
