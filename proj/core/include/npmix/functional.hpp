#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "npmix/estimator.hpp"

namespace npmix {

// A statistical functional θ(F), evaluated by its sample version on the
// pooled completed rows (each of the nV rows carries mass 1/(nV)).
class Functional {
 public:
  enum class Kind { Mean, Variance, Quantile, Correlation, MeanDifference, Custom };
  using RowStatistic = std::function<double(std::span<const double>)>;

  static Functional mean(std::string variable);
  // Plug-in variance (divisor nV).
  static Functional variance(std::string variable);
  // Left-continuous inverse of the pooled empirical CDF.
  static Functional quantile(std::string variable, double p);
  static Functional correlation(std::string first, std::string second);
  // Mean of `variable` among rows with group == level_a minus among level_b.
  static Functional mean_difference(std::string variable, std::string group,
                                    std::string level_a, std::string level_b);
  // Pooled mean of a statistic of the completed row.
  static Functional custom(std::string name, RowStatistic statistic);

  Kind kind() const noexcept { return kind_; }
  const std::string& variable() const noexcept { return variable_; }
  const std::string& second_variable() const noexcept { return second_; }
  const std::string& group() const noexcept { return group_; }
  const std::string& level_a() const noexcept { return level_a_; }
  const std::string& level_b() const noexcept { return level_b_; }
  double probability() const noexcept { return p_; }

  std::string label() const;
  void validate(const Schema& schema) const;

 private:
  Kind kind_ = Kind::Mean;
  std::string variable_;
  std::string second_;
  std::string group_;
  std::string level_a_;
  std::string level_b_;
  double p_ = 0.5;
  std::string name_;
  RowStatistic statistic_;

  friend double evaluate_on_completions(const CompletedSample&, const Functional&, std::size_t,
                                        std::size_t);
};

// Smallest order statistic x_(k) of sorted values with k/N >= p.
double left_continuous_quantile(std::span<const double> sorted, double p);

// θ evaluated on the pooled rows of completions [first, last).
double evaluate_on_completions(const CompletedSample& completed, const Functional& f,
                               std::size_t first, std::size_t last);

// θ(F̂^MC): all nV completed rows pooled.
double evaluate_functional(const CompletedSample& completed, const Functional& f);

// (1/V) Σ_v θ(F̂^(v)), one completed dataset at a time.
double evaluate_functional_averaged(const CompletedSample& completed, const Functional& f);

}  // namespace npmix
