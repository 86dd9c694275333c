#include "npmix/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "npmix/error.hpp"

namespace npmix {

namespace {

constexpr double kLogSqrtTwoPi = 0.91893853320467274178;

std::size_t category_of(const KernelSpec& spec, double x) {
  const double rounded = std::round(x);
  if (!std::isfinite(x) || rounded != x || rounded < 1.0 ||
      rounded > static_cast<double>(spec.categories)) {
    throw DataError("invalid category value " + std::to_string(x) + " for a variable with " +
                    std::to_string(spec.categories) + " levels");
  }
  return static_cast<std::size_t>(rounded);
}

double quantile_type7(const std::vector<double>& sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

KernelSpec KernelSpec::gaussian(double h) {
  KernelSpec spec{KernelFamily::Gaussian, h, 0};
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::aitchison_aitken(std::size_t categories, double h) {
  KernelSpec spec{KernelFamily::AitchisonAitken, h, categories};
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::aitchison_aitken_default(std::size_t categories) {
  if (categories == 0) throw ConfigError("categorical variable needs at least one level");
  return aitchison_aitken(categories, std::max(0.9, 1.0 / static_cast<double>(categories)));
}

void KernelSpec::validate() const {
  if (family == KernelFamily::Gaussian) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
      throw ConfigError("Gaussian bandwidth must be positive and finite, got " +
                        std::to_string(bandwidth));
    }
    return;
  }
  if (categories == 0) throw ConfigError("categorical variable needs at least one level");
  const double lower = 1.0 / static_cast<double>(categories);
  if (!(bandwidth >= lower && bandwidth <= 1.0)) {
    throw ConfigError("Aitchison-Aitken bandwidth must lie in [1/C, 1] = [" +
                      std::to_string(lower) + ", 1], got " + std::to_string(bandwidth));
  }
}

double kernel_eval(const KernelSpec& spec, double x, double center) {
  if (spec.family == KernelFamily::Gaussian) {
    if (!std::isfinite(x) || !std::isfinite(center)) {
      throw DataError("kernel evaluated at a non-finite value");
    }
    const double z = (x - center) / spec.bandwidth;
    return std::exp(-0.5 * z * z) / (spec.bandwidth * std::sqrt(2.0 * std::numbers::pi));
  }
  const auto a = category_of(spec, x);
  const auto b = category_of(spec, center);
  if (a == b) return spec.bandwidth;
  if (spec.categories == 1) return 0.0;
  return (1.0 - spec.bandwidth) / static_cast<double>(spec.categories - 1);
}

double log_kernel_eval(const KernelSpec& spec, double x, double center) {
  if (spec.family == KernelFamily::Gaussian) {
    const double z = (x - center) / spec.bandwidth;
    return -0.5 * z * z - std::log(spec.bandwidth) - kLogSqrtTwoPi;
  }
  return std::log(kernel_eval(spec, x, center));
}

double kernel_cdf(const KernelSpec& spec, double x, double center) {
  if (spec.family == KernelFamily::Gaussian) {
    if (x == std::numeric_limits<double>::infinity()) return 1.0;
    if (x == -std::numeric_limits<double>::infinity()) return 0.0;
    return standard_normal_cdf((x - center) / spec.bandwidth);
  }
  if (x < 1.0) return 0.0;
  const auto top = static_cast<std::size_t>(
      std::min(std::floor(x), static_cast<double>(spec.categories)));
  double total = 0.0;
  for (std::size_t c = 1; c <= top; ++c) {
    total += kernel_eval(spec, static_cast<double>(c), center);
  }
  return total;
}

double kernel_sample(const KernelSpec& spec, double center, Rng& rng) {
  if (spec.family == KernelFamily::Gaussian) {
    std::normal_distribution<double> normal(0.0, 1.0);
    return center + spec.bandwidth * normal(rng);
  }
  const auto c = category_of(spec, center);
  if (spec.categories == 1 || rng.uniform() < spec.bandwidth) return center;
  // Uniform over the C-1 other categories.
  std::uniform_int_distribution<std::size_t> pick(1, spec.categories - 1);
  std::size_t other = pick(rng);
  if (other >= c) ++other;
  return static_cast<double>(other);
}

double log_product_kernel(std::span<const KernelSpec> specs, std::span<const double> x,
                          std::span<const double> centers) {
  if (specs.size() != x.size() || x.size() != centers.size()) {
    throw DataError("log_product_kernel: prefix length mismatch");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    total += log_kernel_eval(specs[j], x[j], centers[j]);
  }
  return total;
}

double silverman_bandwidth(std::span<const double> values) {
  std::vector<double> sorted;
  sorted.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) sorted.push_back(v);
  }
  const std::size_t m = sorted.size();
  if (m < 2) {
    throw EstimationError("silverman_bandwidth needs at least 2 observed values, got " +
                          std::to_string(m));
  }
  std::sort(sorted.begin(), sorted.end());

  double mean = 0.0;
  for (double v : sorted) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : sorted) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));

  const double iqr = quantile_type7(sorted, 0.75) - quantile_type7(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  if (!(spread > 0.0)) throw EstimationError("degenerate variable: all observed values equal");
  return 0.9 * spread * std::pow(static_cast<double>(m), -0.2);
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace npmix
