#pragma once

#include <cstddef>
#include <vector>

#include "npmix/kernels.hpp"
#include "npmix/sample.hpp"

// Closed-form complete-case estimators for two continuous variables. These
// are diagnostics for cross-checking the Monte Carlo engine, not part of the
// estimation path.
namespace npmix::diagnostics {

struct CCWeights {
  std::vector<double> omega;  // ω_i per row; Σ ω_i = 1
  std::vector<double> alpha;  // α_j per row; nonzero only on complete cases
  std::size_t n00 = 0;
  std::size_t n10 = 0;
  std::size_t n01 = 0;
  std::size_t n11 = 0;
};

// ω_i = (1 + n00/n11 + n10 α_i)/n on complete cases, 1/n on pattern 01,
// 0 otherwise, with α_j the average over 10-rows i of the Nadaraya-Watson
// weight that complete case j receives at X_i1.
CCWeights cc_mean_weights(const ObservedSample& sample, const BandwidthVector& kernels);

// μ̂_2 = Σ_i ω_i X_i2 (unobserved X_i2 carry ω_i = 0).
double cc_closed_form_mean(const ObservedSample& sample, const BandwidthVector& kernels);

}  // namespace npmix::diagnostics
