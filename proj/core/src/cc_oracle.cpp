#include "npmix/cc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "npmix/error.hpp"

namespace npmix::diagnostics {

CCWeights cc_mean_weights(const ObservedSample& sample, const BandwidthVector& kernels) {
  if (sample.dims() != 2) throw ConfigError("the CC oracle is defined for d = 2 only");
  if (kernels.size() != 2 || !kernels[0].continuous()) {
    throw ConfigError("the CC oracle needs continuous Gaussian kernels");
  }
  const std::size_t n = sample.rows();
  CCWeights w;
  std::vector<std::size_t> complete;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = sample.pattern(i);
    if (r[0] && r[1]) {
      ++w.n11;
      complete.push_back(i);
    } else if (r[0]) {
      ++w.n10;
    } else if (r[1]) {
      ++w.n01;
    } else {
      ++w.n00;
    }
  }
  if (w.n11 == 0) throw EstimationError("CC oracle needs at least one complete case");

  // The Gaussian normalizing constant cancels in the ratio; only the
  // exponent is kept, shifted by its maximum.
  const double h = kernels[0].bandwidth;
  w.alpha.assign(n, 0.0);
  std::vector<double> e(complete.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = sample.pattern(i);
    if (!(r[0] && !r[1])) continue;
    const double x = sample.value(i, 0);
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < complete.size(); ++m) {
      const double z = (x - sample.value(complete[m], 0)) / h;
      e[m] = -0.5 * z * z;
      top = std::max(top, e[m]);
    }
    double denom = 0.0;
    for (auto& v : e) {
      v = std::exp(v - top);
      denom += v;
    }
    for (std::size_t m = 0; m < complete.size(); ++m) {
      w.alpha[complete[m]] += e[m] / denom / static_cast<double>(w.n10);
    }
  }

  const auto nn = static_cast<double>(n);
  const double n00_over_n11 = static_cast<double>(w.n00) / static_cast<double>(w.n11);
  w.omega.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = sample.pattern(i);
    if (r[0] && r[1]) {
      w.omega[i] = (1.0 + n00_over_n11 + static_cast<double>(w.n10) * w.alpha[i]) / nn;
    } else if (r[1]) {
      w.omega[i] = 1.0 / nn;
    }
  }
  return w;
}

double cc_closed_form_mean(const ObservedSample& sample, const BandwidthVector& kernels) {
  const auto w = cc_mean_weights(sample, kernels);
  double total = 0.0;
  for (std::size_t i = 0; i < sample.rows(); ++i) {
    if (w.omega[i] != 0.0) total += w.omega[i] * sample.value(i, 1);
  }
  return total;
}

}  // namespace npmix::diagnostics
