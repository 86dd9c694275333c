#include "npmix/sample.hpp"

#include <cmath>
#include <set>

#include "npmix/error.hpp"

namespace npmix {

std::optional<std::size_t> Schema::find(const std::string& name) const {
  for (std::size_t j = 0; j < variables.size(); ++j) {
    if (variables[j].name == name) return j;
  }
  return std::nullopt;
}

std::size_t Schema::index_of(const std::string& name) const {
  if (auto j = find(name)) return *j;
  throw ConfigError("unknown study variable \"" + name + "\"");
}

bool Schema::is_group(const std::string& name) const {
  for (const auto& g : group_columns) {
    if (g == name) return true;
  }
  return false;
}

void Schema::validate() const {
  if (variables.empty()) throw ConfigError("schema needs at least one study variable");
  std::set<std::string> names;
  auto claim = [&](const std::string& name) {
    if (name.empty()) throw ConfigError("empty column name in schema");
    if (!names.insert(name).second) {
      throw ConfigError("duplicate column name \"" + name + "\" in schema");
    }
  };
  for (const auto& v : variables) {
    claim(v.name);
    if (v.type == VariableType::Categorical) {
      if (v.levels.empty()) {
        throw ConfigError("categorical variable \"" + v.name + "\" has no levels");
      }
      std::set<std::string> levels(v.levels.begin(), v.levels.end());
      if (levels.size() != v.levels.size()) {
        throw ConfigError("categorical variable \"" + v.name + "\" repeats a level");
      }
    }
  }
  for (const auto& g : group_columns) claim(g);
  if (id_column) claim(*id_column);
}

Schema Schema::continuous(std::size_t d) {
  Schema s;
  for (std::size_t j = 0; j < d; ++j) {
    s.variables.push_back({"X" + std::to_string(j + 1), VariableType::Continuous, {}});
  }
  return s;
}

ObservedSample::ObservedSample(Schema schema, std::vector<double> values,
                               std::map<std::string, std::vector<std::string>> groups,
                               std::vector<std::string> ids)
    : schema_(std::move(schema)),
      values_(std::move(values)),
      groups_(std::move(groups)),
      ids_(std::move(ids)) {
  schema_.validate();
  const std::size_t d = schema_.dims();
  if (values_.size() % d != 0) {
    throw DataError("value count " + std::to_string(values_.size()) +
                    " is not a multiple of d=" + std::to_string(d));
  }
  const std::size_t n = values_.size() / d;
  if (n == 0) throw DataError("sample has no rows");
  patterns_.reserve(n);
  std::vector<std::uint8_t> bits(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const double x = values_[i * d + j];
      if (std::isnan(x)) {
        bits[j] = 0;
        continue;
      }
      if (!std::isfinite(x)) {
        throw DataError("row " + std::to_string(i + 1) + ", column " + schema_.variables[j].name +
                        ": non-finite value");
      }
      const auto& var = schema_.variables[j];
      if (var.type == VariableType::Categorical &&
          (x != std::round(x) || x < 1.0 || x > static_cast<double>(var.categories()))) {
        throw DataError("row " + std::to_string(i + 1) + ", column " + var.name +
                        ": category code out of range");
      }
      bits[j] = 1;
    }
    patterns_.emplace_back(bits);
  }
  for (const auto& g : schema_.group_columns) {
    auto it = groups_.find(g);
    if (it == groups_.end() || it->second.size() != n) {
      throw DataError("group column \"" + g + "\" missing or of wrong length");
    }
  }
  if (!ids_.empty() && ids_.size() != n) throw DataError("id column has wrong length");
}

ObservedSample ObservedSample::continuous(std::size_t d, std::vector<double> values) {
  return ObservedSample(Schema::continuous(d), std::move(values));
}

const std::vector<std::string>& ObservedSample::group(const std::string& column) const {
  auto it = groups_.find(column);
  if (it == groups_.end()) throw ConfigError("unknown group column \"" + column + "\"");
  return it->second;
}

ObservedSample ObservedSample::select(std::span<const std::size_t> rows) const {
  const std::size_t d = dims();
  ObservedSample out;
  out.schema_ = schema_;
  out.values_.reserve(rows.size() * d);
  out.patterns_.reserve(rows.size());
  for (auto i : rows) {
    if (i >= this->rows()) throw DataError("row index out of range in select");
    auto r = row(i);
    out.values_.insert(out.values_.end(), r.begin(), r.end());
    out.patterns_.push_back(patterns_[i]);
  }
  for (const auto& [name, column] : groups_) {
    auto& dst = out.groups_[name];
    dst.reserve(rows.size());
    for (auto i : rows) dst.push_back(column[i]);
  }
  if (!ids_.empty()) {
    out.ids_.reserve(rows.size());
    for (auto i : rows) out.ids_.push_back(ids_[i]);
  }
  return out;
}

std::vector<double> ObservedSample::observed_values(std::size_t j) const {
  std::vector<double> out;
  for (std::size_t i = 0; i < rows(); ++i) {
    if (patterns_[i][j]) out.push_back(value(i, j));
  }
  return out;
}

}  // namespace npmix
