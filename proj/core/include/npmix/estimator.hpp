#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npmix/kernels.hpp"
#include "npmix/patterns.hpp"
#include "npmix/restrictions.hpp"
#include "npmix/rng.hpp"
#include "npmix/sample.hpp"

namespace npmix {

// One extrapolation factor: draw variable `target` from the kernel mixture
// over `donors`, weighted by the product kernel on the `prefix` variables.
struct ImputationStep {
  std::size_t target = 0;
  std::vector<std::size_t> prefix;
  std::vector<std::size_t> donors;  // row indices, ascending
  std::string label;                // "t=1,s=2" or "r=0100,j=3"
};

// Ordered extrapolation factors for every unit with a given pattern.
struct PatternPlan {
  ResponsePattern pattern;
  std::vector<ImputationStep> steps;
};

// Steps for pattern r under the restriction, with donor rows taken from the
// sample. r need not occur in the sample. Throws EstimationError when a
// donor pool is empty.
PatternPlan plan_pattern(const ObservedSample& sample, const Restriction& restriction,
                         const ResponsePattern& r);

class CompletionPlan {
 public:
  // Validates the restriction against the sample first; any empty reachable
  // donor set is an EstimationError naming the step.
  static CompletionPlan build(const ObservedSample& sample, const Restriction& restriction);

  const PatternPlan& for_pattern(const ResponsePattern& r) const;
  const std::map<ResponsePattern, PatternPlan>& patterns() const noexcept { return plans_; }

 private:
  std::map<ResponsePattern, PatternPlan> plans_;
};

// Normalized donor weights W_i over all n rows (zero off the donor set).
// `point` is a full-length row; only the prefix entries are read.
std::vector<double> donor_weights(const ObservedSample& sample,
                                  std::span<const std::size_t> prefix,
                                  std::span<const double> point,
                                  std::span<const std::size_t> donors,
                                  const BandwidthVector& kernels);

// Draws one completion of a row by sequential sampling. Donor log-weights
// from the row's observed prefix coordinates are computed once and reused
// across draws.
class RowImputer {
 public:
  RowImputer(const ObservedSample& sample, const PatternPlan& plan, std::size_t row,
             const BandwidthVector& kernels);

  // Writes the completed row into `out` (length d).
  void draw(Rng& rng, std::span<double> out) const;

 private:
  // A prefix variable filled in earlier in the same draw, with its donor
  // values laid out contiguously. Log-kernel terms shared by every donor are
  // dropped since they cancel in the normalization.
  struct DrawnColumn {
    std::size_t variable = 0;
    bool gaussian = true;
    double inv_bandwidth = 1.0;
    double log_same = 0.0;  // Aitchison-Aitken
    double log_other = 0.0;
    std::vector<double> donor_values;
  };

  struct StepCache {
    const ImputationStep* step = nullptr;
    std::vector<double> base_log_weight;  // per donor
    std::vector<DrawnColumn> drawn;
    std::vector<double> cumulative;       // when nothing in the prefix is drawn
  };

  const ObservedSample& sample_;
  const BandwidthVector& kernels_;
  std::size_t row_;
  std::vector<StepCache> steps_;
};

std::vector<double> impute_row_monotone(const ObservedSample& sample, std::size_t row,
                                        const MonotoneRestriction& restriction,
                                        const BandwidthVector& kernels, Rng& rng);

std::vector<double> impute_row_nonmonotone(const ObservedSample& sample, std::size_t row,
                                           const NonmonotoneRestriction& restriction,
                                           const BandwidthVector& kernels, Rng& rng);

// S_{n,V}: V completions of every row, stored completion-major.
class CompletedSample {
 public:
  CompletedSample(ObservedSample base, std::size_t completions);

  const ObservedSample& base() const noexcept { return base_; }
  std::size_t completions() const noexcept { return completions_; }
  std::size_t rows() const noexcept { return base_.rows(); }
  std::size_t dims() const noexcept { return base_.dims(); }

  std::span<const double> row(std::size_t v, std::size_t i) const {
    return {values_.data() + (v * rows() + i) * dims(), dims()};
  }
  std::span<double> row(std::size_t v, std::size_t i) {
    return {values_.data() + (v * rows() + i) * dims(), dims()};
  }
  double value(std::size_t v, std::size_t i, std::size_t j) const { return row(v, i)[j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const CompletedSample& other) const;

 private:
  ObservedSample base_;
  std::size_t completions_;
  std::vector<double> values_;
};

// Row i, completion v uses the substream derive_seed(seed, i, v), so the
// result does not depend on `threads`.
CompletedSample complete_sample(const ObservedSample& sample, const Restriction& restriction,
                                std::size_t completions, const BandwidthVector& kernels,
                                std::uint64_t seed, unsigned threads = 1);

CompletedSample complete_sample(const ObservedSample& sample, const CompletionPlan& plan,
                                std::size_t completions, const BandwidthVector& kernels,
                                std::uint64_t seed, unsigned threads = 1);

// Exact one-step extrapolation CDF Σ_i W_i · K-CDF(x; X_i,target).
double conditional_cdf_1step(const ObservedSample& sample, const ImputationStep& step,
                             std::span<const double> point, const BandwidthVector& kernels,
                             double x);

// One-step extrapolation density Σ_i W_i · K(x; X_i,target).
double conditional_density_1step(const ObservedSample& sample, const ImputationStep& step,
                                 std::span<const double> point,
                                 const BandwidthVector& kernels, double x);

// (1/(nV)) Σ_i Σ_v I(R_i = r) I(X_i^(v) <= upper). Without a pattern the
// indicator on R_i is dropped.
double mc_cdf(const CompletedSample& completed, std::span<const double> upper,
              const std::optional<ResponsePattern>& pattern = std::nullopt);

// ĝ_h(x_r, r) = (1/n) Σ_i I(R_i = r) Π_{j: r_j = 1} K_j(x_j; X_ij).
double surrogate_density(const ObservedSample& sample, std::span<const double> x,
                         const ResponsePattern& r, const BandwidthVector& kernels);

// f̂(x, r) = ĝ_h(x_r, r) · Π over extrapolation steps of the one-step density.
double full_density(const ObservedSample& sample, std::span<const double> x,
                    const ResponsePattern& r, const Restriction& restriction,
                    const BandwidthVector& kernels);

}  // namespace npmix
