#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "npmix/rng.hpp"

namespace npmix {

enum class KernelFamily { Gaussian, AitchisonAitken };

// One variable's kernel. Gaussian: density of N(center, h^2). Aitchison-Aitken
// on categories 1..C: h at the center, (1-h)/(C-1) elsewhere, 1/C <= h <= 1.
struct KernelSpec {
  KernelFamily family = KernelFamily::Gaussian;
  double bandwidth = 1.0;
  std::size_t categories = 0;

  static KernelSpec gaussian(double h);
  static KernelSpec aitchison_aitken(std::size_t categories, double h);
  // max(0.9, 1/C), used when no categorical bandwidth is configured.
  static KernelSpec aitchison_aitken_default(std::size_t categories);

  bool continuous() const noexcept { return family == KernelFamily::Gaussian; }
  // Throws ConfigError on an invalid bandwidth.
  void validate() const;
};

using BandwidthVector = std::vector<KernelSpec>;

double kernel_eval(const KernelSpec& spec, double x, double center);
double log_kernel_eval(const KernelSpec& spec, double x, double center);
// P(X <= x) under the kernel centred at `center`.
double kernel_cdf(const KernelSpec& spec, double x, double center);
double kernel_sample(const KernelSpec& spec, double center, Rng& rng);

// Sum of log kernel values over a prefix; may be -inf.
double log_product_kernel(std::span<const KernelSpec> specs, std::span<const double> x,
                          std::span<const double> centers);

// 0.9 * min(sd, IQR/1.34) * m^(-1/5); sd uses the m-1 denominator and the
// quartiles use linear interpolation between order statistics.
double silverman_bandwidth(std::span<const double> values);

double standard_normal_cdf(double z);

}  // namespace npmix
