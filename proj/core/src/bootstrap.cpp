#include "npmix/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "npmix/error.hpp"
#include "npmix/parallel.hpp"

namespace npmix {

namespace {

CompletedSample complete_replicate(const ObservedSample& sample, const EstimationSetup& setup,
                                   std::uint64_t seed, std::size_t b,
                                   const StratumBandwidths* frozen) {
  Rng rng(derive_seed(seed, kResampleStream, b));
  const auto boot = resample(sample, rng);
  return complete(boot, setup, derive_seed(seed, kCompleteStream, b), frozen);
}

}  // namespace

std::vector<std::size_t> resample_indices(std::size_t n, Rng& rng) {
  if (n == 0) throw DataError("cannot resample an empty sample");
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = pick(rng);
  return out;
}

ObservedSample resample(const ObservedSample& sample, Rng& rng) {
  const auto idx = resample_indices(sample.rows(), rng);
  return sample.select(idx);
}

Interval percentile_interval(std::span<const double> replicates, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (replicates.size() < 2) throw EstimationError("percentile interval needs B >= 2");
  std::vector<double> sorted(replicates.begin(), replicates.end());
  std::sort(sorted.begin(), sorted.end());
  return {left_continuous_quantile(sorted, alpha / 2.0),
          left_continuous_quantile(sorted, 1.0 - alpha / 2.0)};
}

std::vector<double> bootstrap_replicate(const ObservedSample& sample,
                                        const EstimationSetup& setup,
                                        const std::vector<Functional>& functionals,
                                        std::uint64_t seed, std::size_t b,
                                        const StratumBandwidths* frozen) {
  const auto completed = complete_replicate(sample, setup, seed, b, frozen);
  std::vector<double> values;
  values.reserve(functionals.size());
  for (const auto& f : functionals) values.push_back(evaluate_functional(completed, f));
  return values;
}

std::vector<BootstrapResult> run_bootstrap(const ObservedSample& sample,
                                           const EstimationSetup& setup,
                                           const std::vector<Functional>& functionals,
                                           const BootstrapOptions& options) {
  if (options.B < 2) throw ConfigError("bootstrap needs B >= 2");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  for (const auto& f : functionals) f.validate(sample.schema());

  const StratumBandwidths original = fit_bandwidths(sample, setup);
  const auto completed = complete(sample, setup, options.seed, &original);

  std::vector<BootstrapResult> results(functionals.size());
  for (std::size_t f = 0; f < functionals.size(); ++f) {
    auto& r = results[f];
    r.functional = functionals[f].label();
    r.restriction = setup.restriction.label();
    r.point = evaluate_functional(completed, functionals[f]);
    r.alpha = options.alpha;
    r.B = options.B;
    r.V = setup.completions;
    r.seed = options.seed;
  }

  const StratumBandwidths* frozen =
      setup.policy == BandwidthPolicy::Frozen ? &original : nullptr;
  EstimationSetup inner = setup;
  inner.threads = 1;

  // values[b][f]; nullopt marks a failed replicate.
  std::vector<std::vector<std::optional<double>>> values(
      options.B, std::vector<std::optional<double>>(functionals.size()));
  parallel_for(options.B, options.threads, [&](std::size_t b) {
    try {
      const auto replicate = complete_replicate(sample, inner, options.seed, b, frozen);
      for (std::size_t f = 0; f < functionals.size(); ++f) {
        try {
          values[b][f] = evaluate_functional(replicate, functionals[f]);
        } catch (const EstimationError&) {
        }
      }
    } catch (const EstimationError&) {
    }
  });

  for (std::size_t f = 0; f < functionals.size(); ++f) {
    auto& r = results[f];
    for (std::size_t b = 0; b < options.B; ++b) {
      if (values[b][f]) {
        r.replicates.push_back(*values[b][f]);
      } else {
        r.failed.push_back(b);
      }
    }
    const double allowed = options.max_failure_fraction * static_cast<double>(options.B);
    if (static_cast<double>(r.failed.size()) > allowed) {
      throw EstimationError(std::to_string(r.failed.size()) + " of " +
                            std::to_string(options.B) + " bootstrap replicates failed for " +
                            r.functional + " under " + r.restriction +
                            " (empty donor pools or undefined functional after resampling)");
    }
    if (r.replicates.size() < 2) {
      throw EstimationError("fewer than 2 successful bootstrap replicates for " + r.functional);
    }
    r.interval = percentile_interval(r.replicates, options.alpha);
  }
  return results;
}

BootstrapResult run_bootstrap(const ObservedSample& sample, const EstimationSetup& setup,
                              const Functional& functional, const BootstrapOptions& options) {
  return run_bootstrap(sample, setup, std::vector<Functional>{functional}, options).front();
}

}  // namespace npmix
