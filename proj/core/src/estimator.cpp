#include "npmix/estimator.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <limits>
#include <sstream>

#include "npmix/error.hpp"
#include "npmix/parallel.hpp"

namespace npmix {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string describe_prefix(const ObservedSample& sample, std::span<const std::size_t> prefix,
                            std::span<const double> point) {
  std::ostringstream os;
  os << "(";
  for (std::size_t p = 0; p < prefix.size(); ++p) {
    if (p) os << ", ";
    os << sample.schema().variables[prefix[p]].name << "=" << point[prefix[p]];
  }
  os << ")";
  return os.str();
}

void check_kernels(const ObservedSample& sample, const BandwidthVector& kernels) {
  if (kernels.size() != sample.dims()) {
    throw ConfigError("bandwidth vector has length " + std::to_string(kernels.size()) +
                      ", expected " + std::to_string(sample.dims()));
  }
}

// Log-weights over the donor list; returns the maximum.
double donor_log_weights(const ObservedSample& sample, std::span<const std::size_t> prefix,
                         std::span<const double> point, std::span<const std::size_t> donors,
                         const BandwidthVector& kernels, std::vector<double>& out) {
  out.assign(donors.size(), 0.0);
  double max = kNegInf;
  for (std::size_t k = 0; k < donors.size(); ++k) {
    const auto donor = sample.row(donors[k]);
    double lw = 0.0;
    for (auto j : prefix) lw += log_kernel_eval(kernels[j], point[j], donor[j]);
    out[k] = lw;
    max = std::max(max, lw);
  }
  return max;
}

// exp(lw - max) accumulated; returns the total.
double accumulate_weights(std::span<const double> log_weights, double max,
                          std::vector<double>& cumulative) {
  cumulative.resize(log_weights.size());
  double total = 0.0;
  for (std::size_t k = 0; k < log_weights.size(); ++k) {
    total += std::exp(log_weights[k] - max);
    cumulative[k] = total;
  }
  return total;
}

std::size_t pick_index(std::span<const double> cumulative, Rng& rng) {
  const double target = rng.uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

[[noreturn]] void throw_vanished(const ObservedSample& sample, const ImputationStep& step,
                                 std::span<const double> point) {
  throw EstimationError("all donor weights vanish for (" + step.label + ") at prefix " +
                        describe_prefix(sample, step.prefix, point));
}

std::string monotone_label(std::size_t t, std::size_t s) {
  return "t=" + std::to_string(t) + ",s=" + std::to_string(s);
}

}  // namespace

PatternPlan plan_pattern(const ObservedSample& sample, const Restriction& restriction,
                         const ResponsePattern& r) {
  const std::size_t d = sample.dims();
  if (r.size() != d) throw DataError("pattern " + r.to_string() + " has wrong dimension");
  PatternPlan plan{r, {}};
  const std::size_t observed = r.observed_count();

  if (restriction.is_monotone()) {
    if (r != ResponsePattern::monotone(d, observed)) {
      throw EstimationError("pattern " + r.to_string() +
                            " is not monotone; the monotone engine cannot extrapolate it");
    }
    std::vector<std::size_t> row_time(sample.rows());
    for (std::size_t i = 0; i < sample.rows(); ++i) {
      const auto& p = sample.pattern(i);
      const std::size_t t = p.observed_count();
      if (p != ResponsePattern::monotone(d, t)) {
        throw EstimationError("row " + std::to_string(i + 1) + " has nonmonotone pattern " +
                              p.to_string());
      }
      row_time[i] = t;
    }
    const std::size_t t = observed;
    for (std::size_t s = t + 1; s <= d; ++s) {
      ImputationStep step;
      step.target = s - 1;
      for (std::size_t j = 0; j + 1 < s; ++j) step.prefix.push_back(j);
      step.label = monotone_label(t, s);
      const auto times = monotone_donor_times(restriction.monotone(), t, s, d);
      for (std::size_t i = 0; i < sample.rows(); ++i) {
        if (std::binary_search(times.begin(), times.end(), row_time[i])) {
          step.donors.push_back(i);
        }
      }
      if (step.donors.empty()) {
        throw EstimationError("no donors for (" + step.label + "): donor set " +
                              format_times(times) + " has no observations");
      }
      plan.steps.push_back(std::move(step));
    }
    return plan;
  }

  const auto& rule = restriction.nonmonotone();
  const Permutation pi = rule.permutation_for(r);
  if (pi.base_pattern() != r) {
    throw ConfigError("permutation registered for " + r.to_string() + " has base pattern " +
                      pi.base_pattern().to_string());
  }
  const auto counts = pattern_counts(sample.patterns());
  for (std::size_t j = observed + 1; j <= d; ++j) {
    ImputationStep step;
    step.target = pi[j - 1];
    for (std::size_t p = 0; p + 1 < j; ++p) step.prefix.push_back(pi[p]);
    step.label = "r=" + r.to_string() + ",j=" + std::to_string(j);
    std::map<ResponsePattern, bool> accepted;
    for (const auto& [candidate, c] : counts) {
      accepted[candidate] = is_donor_pattern(rule, pi, j, candidate);
    }
    for (std::size_t i = 0; i < sample.rows(); ++i) {
      if (accepted[sample.pattern(i)]) step.donors.push_back(i);
    }
    if (step.donors.empty()) {
      throw EstimationError("no donors for (" + step.label + "): no observed pattern observes " +
                            pi.prefix_pattern(j).to_string() + " under " + restriction.label());
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

CompletionPlan CompletionPlan::build(const ObservedSample& sample,
                                     const Restriction& restriction) {
  const auto report = validate_restriction(restriction, sample.dims(), sample.patterns());
  if (!report.clean()) {
    const auto bad = report.problems();
    std::string message = "restriction " + restriction.label() + " cannot be estimated:";
    for (const auto& e : bad) message += " no donors for (" + e.step + "): " + e.problem + ";";
    throw EstimationError(message);
  }
  CompletionPlan plan;
  for (const auto& [r, count] : pattern_counts(sample.patterns())) {
    plan.plans_.emplace(r, plan_pattern(sample, restriction, r));
  }
  return plan;
}

const PatternPlan& CompletionPlan::for_pattern(const ResponsePattern& r) const {
  auto it = plans_.find(r);
  if (it == plans_.end()) {
    throw EstimationError("completion plan has no entry for pattern " + r.to_string());
  }
  return it->second;
}

std::vector<double> donor_weights(const ObservedSample& sample,
                                  std::span<const std::size_t> prefix,
                                  std::span<const double> point,
                                  std::span<const std::size_t> donors,
                                  const BandwidthVector& kernels) {
  check_kernels(sample, kernels);
  if (donors.empty()) throw EstimationError("no donors: the donor pool is empty in the data");
  std::vector<double> log_weights;
  const double max = donor_log_weights(sample, prefix, point, donors, kernels, log_weights);
  if (max == kNegInf) {
    throw EstimationError("all donor weights vanish at prefix " +
                          describe_prefix(sample, prefix, point));
  }
  double total = 0.0;
  for (auto& lw : log_weights) {
    lw = std::exp(lw - max);
    total += lw;
  }
  std::vector<double> weights(sample.rows(), 0.0);
  for (std::size_t k = 0; k < donors.size(); ++k) weights[donors[k]] += log_weights[k] / total;
  return weights;
}

RowImputer::RowImputer(const ObservedSample& sample, const PatternPlan& plan, std::size_t row,
                       const BandwidthVector& kernels)
    : sample_(sample), kernels_(kernels), row_(row) {
  check_kernels(sample, kernels);
  const auto& pattern = sample.pattern(row);
  if (pattern != plan.pattern) {
    throw EstimationError("row " + std::to_string(row + 1) + " does not match plan pattern " +
                          plan.pattern.to_string());
  }
  const auto observed_row = sample.row(row);
  steps_.reserve(plan.steps.size());
  for (const auto& step : plan.steps) {
    StepCache cache;
    cache.step = &step;
    std::vector<std::size_t> observed_prefix;
    for (auto j : step.prefix) {
      if (pattern[j]) {
        if (!cache.drawn.empty()) {
          throw EstimationError("step (" + step.label +
                                ") lists an observed variable after an imputed one");
        }
        observed_prefix.push_back(j);
        continue;
      }
      DrawnColumn column;
      column.variable = j;
      const auto& spec = kernels[j];
      column.gaussian = spec.continuous();
      if (column.gaussian) {
        column.inv_bandwidth = 1.0 / spec.bandwidth;
      } else {
        column.log_same = std::log(spec.bandwidth);
        column.log_other = spec.categories > 1
                               ? std::log((1.0 - spec.bandwidth) /
                                          static_cast<double>(spec.categories - 1))
                               : kNegInf;
      }
      column.donor_values.reserve(step.donors.size());
      for (auto donor : step.donors) column.donor_values.push_back(sample.value(donor, j));
      cache.drawn.push_back(std::move(column));
    }
    const double max = donor_log_weights(sample, observed_prefix, observed_row, step.donors,
                                         kernels, cache.base_log_weight);
    if (cache.drawn.empty()) {
      if (max == kNegInf) throw_vanished(sample, step, observed_row);
      accumulate_weights(cache.base_log_weight, max, cache.cumulative);
    }
    steps_.push_back(std::move(cache));
  }
}

void RowImputer::draw(Rng& rng, std::span<double> out) const {
  const auto observed_row = sample_.row(row_);
  std::copy(observed_row.begin(), observed_row.end(), out.begin());
  thread_local std::vector<double> log_weights;
  thread_local std::vector<double> cumulative;
  for (const auto& cache : steps_) {
    const auto& step = *cache.step;
    std::size_t k = 0;
    if (cache.drawn.empty()) {
      k = pick_index(cache.cumulative, rng);
    } else {
      log_weights.assign(cache.base_log_weight.begin(), cache.base_log_weight.end());
      const std::size_t m_count = log_weights.size();
      for (const auto& column : cache.drawn) {
        const double x = out[column.variable];
        const double* values = column.donor_values.data();
        double* lw = log_weights.data();
        if (column.gaussian) {
          const double inv_h = column.inv_bandwidth;
          for (std::size_t m = 0; m < m_count; ++m) {
            const double z = (x - values[m]) * inv_h;
            lw[m] -= 0.5 * z * z;
          }
        } else {
          for (std::size_t m = 0; m < m_count; ++m) {
            lw[m] += values[m] == x ? column.log_same : column.log_other;
          }
        }
      }
      const double max = *std::max_element(log_weights.begin(), log_weights.end());
      if (max == kNegInf) throw_vanished(sample_, step, out);
      accumulate_weights(log_weights, max, cumulative);
      k = pick_index(cumulative, rng);
    }
    const std::size_t donor = step.donors[k];
    out[step.target] = kernel_sample(kernels_[step.target], sample_.value(donor, step.target), rng);
  }
}

std::vector<double> impute_row_monotone(const ObservedSample& sample, std::size_t row,
                                        const MonotoneRestriction& restriction,
                                        const BandwidthVector& kernels, Rng& rng) {
  const Restriction wrapped(restriction, "monotone");
  const auto plan = plan_pattern(sample, wrapped, sample.pattern(row));
  std::vector<double> out(sample.dims());
  RowImputer(sample, plan, row, kernels).draw(rng, out);
  return out;
}

std::vector<double> impute_row_nonmonotone(const ObservedSample& sample, std::size_t row,
                                           const NonmonotoneRestriction& restriction,
                                           const BandwidthVector& kernels, Rng& rng) {
  const Restriction wrapped(restriction, "nonmonotone");
  const auto plan = plan_pattern(sample, wrapped, sample.pattern(row));
  std::vector<double> out(sample.dims());
  RowImputer(sample, plan, row, kernels).draw(rng, out);
  return out;
}

CompletedSample::CompletedSample(ObservedSample base, std::size_t completions)
    : base_(std::move(base)), completions_(completions) {
  if (completions_ == 0) throw ConfigError("number of completions V must be at least 1");
  values_.assign(completions_ * base_.rows() * base_.dims(),
                 std::numeric_limits<double>::quiet_NaN());
}

bool CompletedSample::operator==(const CompletedSample& other) const {
  if (completions_ != other.completions_ || rows() != other.rows() || dims() != other.dims()) {
    return false;
  }
  // Bitwise comparison of the completed values.
  return std::equal(values_.begin(), values_.end(), other.values_.begin(),
                    [](double a, double b) {
                      return std::memcmp(&a, &b, sizeof(double)) == 0;
                    });
}

CompletedSample complete_sample(const ObservedSample& sample, const Restriction& restriction,
                                std::size_t completions, const BandwidthVector& kernels,
                                std::uint64_t seed, unsigned threads) {
  const auto plan = CompletionPlan::build(sample, restriction);
  return complete_sample(sample, plan, completions, kernels, seed, threads);
}

CompletedSample complete_sample(const ObservedSample& sample, const CompletionPlan& plan,
                                std::size_t completions, const BandwidthVector& kernels,
                                std::uint64_t seed, unsigned threads) {
  check_kernels(sample, kernels);
  CompletedSample completed(sample, completions);
  const std::size_t n = sample.rows();
  parallel_for(n, threads, [&](std::size_t i) {
    const auto& pattern = sample.pattern(i);
    if (pattern.complete()) {
      const auto src = sample.row(i);
      for (std::size_t v = 0; v < completions; ++v) {
        auto dst = completed.row(v, i);
        std::copy(src.begin(), src.end(), dst.begin());
      }
      return;
    }
    const RowImputer imputer(sample, plan.for_pattern(pattern), i, kernels);
    for (std::size_t v = 0; v < completions; ++v) {
      Rng rng(derive_seed(seed, i, v));
      imputer.draw(rng, completed.row(v, i));
    }
  });
  return completed;
}

double conditional_cdf_1step(const ObservedSample& sample, const ImputationStep& step,
                             std::span<const double> point, const BandwidthVector& kernels,
                             double x) {
  const auto weights = donor_weights(sample, step.prefix, point, step.donors, kernels);
  double total = 0.0;
  for (auto i : step.donors) {
    total += weights[i] * kernel_cdf(kernels[step.target], x, sample.value(i, step.target));
  }
  return std::min(total, 1.0);
}

double conditional_density_1step(const ObservedSample& sample, const ImputationStep& step,
                                 std::span<const double> point,
                                 const BandwidthVector& kernels, double x) {
  const auto weights = donor_weights(sample, step.prefix, point, step.donors, kernels);
  double total = 0.0;
  for (auto i : step.donors) {
    total += weights[i] * kernel_eval(kernels[step.target], x, sample.value(i, step.target));
  }
  return total;
}

double mc_cdf(const CompletedSample& completed, std::span<const double> upper,
              const std::optional<ResponsePattern>& pattern) {
  const std::size_t n = completed.rows();
  const std::size_t d = completed.dims();
  if (upper.size() != d) throw DataError("mc_cdf: box has wrong dimension");
  std::size_t hits = 0;
  for (std::size_t v = 0; v < completed.completions(); ++v) {
    for (std::size_t i = 0; i < n; ++i) {
      if (pattern && completed.base().pattern(i) != *pattern) continue;
      const auto x = completed.row(v, i);
      bool inside = true;
      for (std::size_t j = 0; j < d && inside; ++j) inside = x[j] <= upper[j];
      if (inside) ++hits;
    }
  }
  return static_cast<double>(hits) /
         (static_cast<double>(n) * static_cast<double>(completed.completions()));
}

double surrogate_density(const ObservedSample& sample, std::span<const double> x,
                         const ResponsePattern& r, const BandwidthVector& kernels) {
  check_kernels(sample, kernels);
  if (x.size() != sample.dims() || r.size() != sample.dims()) {
    throw DataError("surrogate_density: dimension mismatch");
  }
  const auto observed = r.observed_indices();
  double total = 0.0;
  for (std::size_t i = 0; i < sample.rows(); ++i) {
    if (sample.pattern(i) != r) continue;
    double product = 1.0;
    for (auto j : observed) product *= kernel_eval(kernels[j], x[j], sample.value(i, j));
    total += product;
  }
  return total / static_cast<double>(sample.rows());
}

double full_density(const ObservedSample& sample, std::span<const double> x,
                    const ResponsePattern& r, const Restriction& restriction,
                    const BandwidthVector& kernels) {
  double density = surrogate_density(sample, x, r, kernels);
  if (density == 0.0) return 0.0;
  const auto plan = plan_pattern(sample, restriction, r);
  for (const auto& step : plan.steps) {
    try {
      density *= conditional_density_1step(sample, step, x, kernels, x[step.target]);
    } catch (const EstimationError&) {
      throw EstimationError("zero prefix density in (" + step.label + ") at " +
                            describe_prefix(sample, step.prefix, x));
    }
  }
  return density;
}

}  // namespace npmix
