#include "npmix/functional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "npmix/error.hpp"

namespace npmix {

double left_continuous_quantile(std::span<const double> values, double p) {
  const std::size_t n = values.size();
  if (n == 0) throw EstimationError("quantile of an empty sample");
  const auto total = static_cast<double>(n);
  auto k = static_cast<std::size_t>(std::ceil(p * total));
  k = std::clamp<std::size_t>(k, 1, n);
  while (k > 1 && static_cast<double>(k - 1) / total >= p) --k;
  while (k < n && static_cast<double>(k) / total < p) ++k;
  return values[k - 1];
}

Functional Functional::mean(std::string variable) {
  Functional f;
  f.kind_ = Kind::Mean;
  f.variable_ = std::move(variable);
  return f;
}

Functional Functional::variance(std::string variable) {
  Functional f;
  f.kind_ = Kind::Variance;
  f.variable_ = std::move(variable);
  return f;
}

Functional Functional::quantile(std::string variable, double p) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("quantile level must lie in (0, 1)");
  Functional f;
  f.kind_ = Kind::Quantile;
  f.variable_ = std::move(variable);
  f.p_ = p;
  return f;
}

Functional Functional::correlation(std::string first, std::string second) {
  Functional f;
  f.kind_ = Kind::Correlation;
  f.variable_ = std::move(first);
  f.second_ = std::move(second);
  return f;
}

Functional Functional::mean_difference(std::string variable, std::string group,
                                       std::string level_a, std::string level_b) {
  Functional f;
  f.kind_ = Kind::MeanDifference;
  f.variable_ = std::move(variable);
  f.group_ = std::move(group);
  f.level_a_ = std::move(level_a);
  f.level_b_ = std::move(level_b);
  return f;
}

Functional Functional::custom(std::string name, RowStatistic statistic) {
  if (!statistic) throw ConfigError("custom functional needs a statistic");
  Functional f;
  f.kind_ = Kind::Custom;
  f.name_ = std::move(name);
  f.statistic_ = std::move(statistic);
  return f;
}

std::string Functional::label() const {
  std::ostringstream os;
  switch (kind_) {
    case Kind::Mean: os << "mean(" << variable_ << ")"; break;
    case Kind::Variance: os << "variance(" << variable_ << ")"; break;
    case Kind::Quantile: os << "quantile(" << variable_ << "," << p_ << ")"; break;
    case Kind::Correlation: os << "correlation(" << variable_ << "," << second_ << ")"; break;
    case Kind::MeanDifference:
      os << "mean_difference(" << variable_ << ";" << group_ << ":" << level_a_ << "-"
         << level_b_ << ")";
      break;
    case Kind::Custom: os << "custom(" << name_ << ")"; break;
  }
  return os.str();
}

void Functional::validate(const Schema& schema) const {
  if (kind_ == Kind::Custom) return;
  schema.index_of(variable_);
  if (kind_ == Kind::Correlation) schema.index_of(second_);
  if (kind_ == Kind::MeanDifference && !schema.is_group(group_)) {
    throw ConfigError("mean_difference refers to unknown group column \"" + group_ + "\"");
  }
}

double evaluate_on_completions(const CompletedSample& completed, const Functional& f,
                               std::size_t first, std::size_t last) {
  using Kind = Functional::Kind;
  const std::size_t n = completed.rows();
  if (first >= last || last > completed.completions()) {
    throw EstimationError("invalid completion range");
  }
  const auto pooled = static_cast<double>(n * (last - first));
  const Schema& schema = completed.base().schema();

  if (f.kind_ == Kind::Custom) {
    double total = 0.0;
    for (std::size_t v = first; v < last; ++v) {
      for (std::size_t i = 0; i < n; ++i) total += f.statistic_(completed.row(v, i));
    }
    return total / pooled;
  }

  const std::size_t j = schema.index_of(f.variable_);
  switch (f.kind_) {
    case Kind::Mean: {
      double total = 0.0;
      for (std::size_t v = first; v < last; ++v) {
        for (std::size_t i = 0; i < n; ++i) total += completed.value(v, i, j);
      }
      return total / pooled;
    }
    case Kind::Variance: {
      double total = 0.0;
      for (std::size_t v = first; v < last; ++v) {
        for (std::size_t i = 0; i < n; ++i) total += completed.value(v, i, j);
      }
      const double mean = total / pooled;
      double ss = 0.0;
      for (std::size_t v = first; v < last; ++v) {
        for (std::size_t i = 0; i < n; ++i) {
          const double dev = completed.value(v, i, j) - mean;
          ss += dev * dev;
        }
      }
      return ss / pooled;
    }
    case Kind::Quantile: {
      std::vector<double> values;
      values.reserve(n * (last - first));
      for (std::size_t v = first; v < last; ++v) {
        for (std::size_t i = 0; i < n; ++i) values.push_back(completed.value(v, i, j));
      }
      std::sort(values.begin(), values.end());
      return left_continuous_quantile(values, f.p_);
    }
    case Kind::Correlation: {
      const std::size_t k = schema.index_of(f.second_);
      double sx = 0.0, sy = 0.0;
      for (std::size_t v = first; v < last; ++v) {
        for (std::size_t i = 0; i < n; ++i) {
          sx += completed.value(v, i, j);
          sy += completed.value(v, i, k);
        }
      }
      const double mx = sx / pooled;
      const double my = sy / pooled;
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (std::size_t v = first; v < last; ++v) {
        for (std::size_t i = 0; i < n; ++i) {
          const double dx = completed.value(v, i, j) - mx;
          const double dy = completed.value(v, i, k) - my;
          sxx += dx * dx;
          syy += dy * dy;
          sxy += dx * dy;
        }
      }
      if (!(sxx > 0.0) || !(syy > 0.0)) {
        throw EstimationError("correlation undefined: zero variance in " + f.label());
      }
      return sxy / std::sqrt(sxx * syy);
    }
    case Kind::MeanDifference: {
      const auto& groups = completed.base().group(f.group_);
      double sa = 0.0, sb = 0.0;
      std::size_t na = 0, nb = 0;
      for (std::size_t v = first; v < last; ++v) {
        for (std::size_t i = 0; i < n; ++i) {
          if (groups[i] == f.level_a_) {
            sa += completed.value(v, i, j);
            ++na;
          } else if (groups[i] == f.level_b_) {
            sb += completed.value(v, i, j);
            ++nb;
          }
        }
      }
      if (na == 0 || nb == 0) {
        throw EstimationError("empty group in " + f.label());
      }
      return sa / static_cast<double>(na) - sb / static_cast<double>(nb);
    }
    case Kind::Custom: break;
  }
  throw EstimationError("unsupported functional");
}

double evaluate_functional(const CompletedSample& completed, const Functional& f) {
  return evaluate_on_completions(completed, f, 0, completed.completions());
}

double evaluate_functional_averaged(const CompletedSample& completed, const Functional& f) {
  double total = 0.0;
  for (std::size_t v = 0; v < completed.completions(); ++v) {
    total += evaluate_on_completions(completed, f, v, v + 1);
  }
  return total / static_cast<double>(completed.completions());
}

}  // namespace npmix
