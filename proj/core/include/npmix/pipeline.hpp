#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "npmix/estimator.hpp"
#include "npmix/kernels.hpp"
#include "npmix/restrictions.hpp"
#include "npmix/sample.hpp"

namespace npmix {

enum class BandwidthRule { Silverman, Fixed };

// How to obtain per-variable kernels from a sample. Silverman applies to
// continuous variables; categorical ones get max(0.9, 1/C).
struct BandwidthConfig {
  BandwidthRule rule = BandwidthRule::Silverman;
  std::vector<double> fixed;  // one per study variable when rule == Fixed
};

BandwidthVector compute_bandwidths(const ObservedSample& sample, const BandwidthConfig& config);

// Whether bootstrap replicates recompute bandwidths on the resample or reuse
// the ones fitted to the original sample.
enum class BandwidthPolicy { Recompute, Frozen };

struct EstimationSetup {
  Restriction restriction;
  BandwidthConfig bandwidths;
  BandwidthPolicy policy = BandwidthPolicy::Recompute;
  std::size_t completions = 100;
  // When set, every level of this group column is completed as a separate
  // sample: donors and bandwidths come from the same level only.
  std::optional<std::string> stratify_by;
  unsigned threads = 1;
};

// Per-stratum kernels; the key is the stratum level ("" when unstratified).
using StratumBandwidths = std::map<std::string, BandwidthVector>;

StratumBandwidths fit_bandwidths(const ObservedSample& sample, const EstimationSetup& setup);

// Completes the sample under the setup. With `frozen` the given kernels are
// used instead of fitting new ones. Stratum s uses the substream seed
// derive_seed(seed, hash(level)).
CompletedSample complete(const ObservedSample& sample, const EstimationSetup& setup,
                         std::uint64_t seed, const StratumBandwidths* frozen = nullptr);

// Rows of each stratum level, in ascending row order.
std::map<std::string, std::vector<std::size_t>> strata(const ObservedSample& sample,
                                                       const std::optional<std::string>& by);

}  // namespace npmix
