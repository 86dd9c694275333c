#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "npmix/patterns.hpp"

namespace npmix {

enum class VariableType { Continuous, Categorical };

struct Variable {
  std::string name;
  VariableType type = VariableType::Continuous;
  // Categorical levels; values are stored as 1-based codes into this list.
  std::vector<std::string> levels;

  std::size_t categories() const noexcept { return levels.size(); }
};

// Study variables X_1..X_d in order, plus fully observed auxiliary columns.
struct Schema {
  std::vector<Variable> variables;
  std::vector<std::string> group_columns;
  std::optional<std::string> id_column;

  std::size_t dims() const noexcept { return variables.size(); }
  std::optional<std::size_t> find(const std::string& name) const;
  std::size_t index_of(const std::string& name) const;
  bool is_group(const std::string& name) const;
  void validate() const;

  // d continuous variables named X1..Xd.
  static Schema continuous(std::size_t d);
};

// The observed sample S_n: n rows of d study variables with per-cell
// missingness. Missing slots hold NaN and the pattern bit is 0 exactly there.
class ObservedSample {
 public:
  ObservedSample() = default;
  ObservedSample(Schema schema, std::vector<double> values,
                 std::map<std::string, std::vector<std::string>> groups = {},
                 std::vector<std::string> ids = {});

  // Continuous data given row-major with NaN marking missing cells.
  static ObservedSample continuous(std::size_t d, std::vector<double> values);

  std::size_t rows() const noexcept { return patterns_.size(); }
  std::size_t dims() const noexcept { return schema_.dims(); }
  const Schema& schema() const noexcept { return schema_; }

  double value(std::size_t i, std::size_t j) const { return values_[i * dims() + j]; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * dims(), dims()};
  }
  const std::vector<double>& values() const noexcept { return values_; }
  const ResponsePattern& pattern(std::size_t i) const { return patterns_[i]; }
  const std::vector<ResponsePattern>& patterns() const noexcept { return patterns_; }

  const std::vector<std::string>& group(const std::string& column) const;
  const std::map<std::string, std::vector<std::string>>& groups() const noexcept {
    return groups_;
  }
  const std::vector<std::string>& ids() const noexcept { return ids_; }

  // Rows in the given order (duplicates allowed), auxiliary columns carried along.
  ObservedSample select(std::span<const std::size_t> rows) const;

  // All observed values of variable j.
  std::vector<double> observed_values(std::size_t j) const;

 private:
  Schema schema_;
  std::vector<double> values_;
  std::vector<ResponsePattern> patterns_;
  std::map<std::string, std::vector<std::string>> groups_;
  std::vector<std::string> ids_;
};

}  // namespace npmix
