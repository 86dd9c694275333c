#include "npmix/pipeline.hpp"

#include <string_view>

#include "npmix/error.hpp"
#include "npmix/rng.hpp"

namespace npmix {

namespace {

// FNV-1a; stable across platforms, unlike std::hash.
std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

BandwidthVector compute_bandwidths(const ObservedSample& sample, const BandwidthConfig& config) {
  const Schema& schema = sample.schema();
  BandwidthVector out;
  out.reserve(schema.dims());
  if (config.rule == BandwidthRule::Fixed && config.fixed.size() != schema.dims()) {
    throw ConfigError("fixed bandwidths list has " + std::to_string(config.fixed.size()) +
                      " entries, expected " + std::to_string(schema.dims()));
  }
  for (std::size_t j = 0; j < schema.dims(); ++j) {
    const auto& var = schema.variables[j];
    if (config.rule == BandwidthRule::Fixed) {
      if (var.type == VariableType::Categorical) {
        out.push_back(KernelSpec::aitchison_aitken(var.categories(), config.fixed[j]));
      } else {
        out.push_back(KernelSpec::gaussian(config.fixed[j]));
      }
      continue;
    }
    if (var.type == VariableType::Categorical) {
      out.push_back(KernelSpec::aitchison_aitken_default(var.categories()));
      continue;
    }
    try {
      out.push_back(KernelSpec::gaussian(silverman_bandwidth(sample.observed_values(j))));
    } catch (const EstimationError& e) {
      throw EstimationError("bandwidth for " + var.name + ": " + e.what());
    }
  }
  return out;
}

std::map<std::string, std::vector<std::size_t>> strata(const ObservedSample& sample,
                                                       const std::optional<std::string>& by) {
  std::map<std::string, std::vector<std::size_t>> out;
  if (!by) {
    auto& all = out[""];
    all.resize(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i) all[i] = i;
    return out;
  }
  const auto& column = sample.group(*by);
  for (std::size_t i = 0; i < sample.rows(); ++i) out[column[i]].push_back(i);
  return out;
}

StratumBandwidths fit_bandwidths(const ObservedSample& sample, const EstimationSetup& setup) {
  StratumBandwidths out;
  if (!setup.stratify_by) {
    out[""] = compute_bandwidths(sample, setup.bandwidths);
    return out;
  }
  for (const auto& [level, rows] : strata(sample, setup.stratify_by)) {
    const auto sub = sample.select(rows);
    try {
      out[level] = compute_bandwidths(sub, setup.bandwidths);
    } catch (const Error& e) {
      throw EstimationError(*setup.stratify_by + "=" + level + ": " + e.what());
    }
  }
  return out;
}

CompletedSample complete(const ObservedSample& sample, const EstimationSetup& setup,
                         std::uint64_t seed, const StratumBandwidths* frozen) {
  if (!setup.stratify_by) {
    const BandwidthVector kernels =
        frozen ? frozen->at("") : compute_bandwidths(sample, setup.bandwidths);
    return complete_sample(sample, setup.restriction, setup.completions, kernels, seed,
                           setup.threads);
  }

  CompletedSample out(sample, setup.completions);
  for (const auto& [level, rows] : strata(sample, setup.stratify_by)) {
    const auto sub = sample.select(rows);
    try {
      BandwidthVector kernels;
      if (frozen) {
        auto it = frozen->find(level);
        if (it == frozen->end()) throw EstimationError("no bandwidths for stratum");
        kernels = it->second;
      } else {
        kernels = compute_bandwidths(sub, setup.bandwidths);
      }
      const auto part = complete_sample(sub, setup.restriction, setup.completions, kernels,
                                        derive_seed(seed, stable_hash(level)), setup.threads);
      for (std::size_t v = 0; v < setup.completions; ++v) {
        for (std::size_t k = 0; k < rows.size(); ++k) {
          const auto src = part.row(v, k);
          auto dst = out.row(v, rows[k]);
          std::copy(src.begin(), src.end(), dst.begin());
        }
      }
    } catch (const Error& e) {
      throw EstimationError(*setup.stratify_by + "=" + level + ": " + e.what());
    }
  }
  return out;
}

}  // namespace npmix
