#include "npmix/patterns.hpp"

#include <algorithm>
#include <numeric>

#include "npmix/error.hpp"

namespace npmix {

namespace {

void require_same_dimension(const ResponsePattern& a, const ResponsePattern& b) {
  if (a.size() != b.size()) {
    throw DataError("pattern dimension mismatch: " + a.to_string() + " vs " +
                    b.to_string());
  }
}

}  // namespace

ResponsePattern::ResponsePattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw DataError("response pattern entries must be 0 or 1");
  }
}

ResponsePattern ResponsePattern::from_string(std::string_view text) {
  if (text.empty()) throw DataError("empty response pattern");
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw DataError("invalid response pattern \"" + std::string(text) + "\"");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return ResponsePattern(std::move(bits));
}

ResponsePattern ResponsePattern::all_observed(std::size_t d) {
  return ResponsePattern(std::vector<std::uint8_t>(d, 1));
}

ResponsePattern ResponsePattern::all_missing(std::size_t d) {
  return ResponsePattern(std::vector<std::uint8_t>(d, 0));
}

ResponsePattern ResponsePattern::monotone(std::size_t d, std::size_t observed) {
  if (observed > d) throw DataError("dropout time exceeds dimension");
  std::vector<std::uint8_t> bits(d, 0);
  std::fill_n(bits.begin(), observed, std::uint8_t{1});
  return ResponsePattern(std::move(bits));
}

std::size_t ResponsePattern::observed_count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<std::size_t> ResponsePattern::observed_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (bits_[j]) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> ResponsePattern::missing_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (!bits_[j]) out.push_back(j);
  }
  return out;
}

std::string ResponsePattern::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (bits_[j]) s[j] = '1';
  }
  return s;
}

std::size_t hamming_distance(const ResponsePattern& a, const ResponsePattern& b) {
  require_same_dimension(a, b);
  std::size_t count = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] != b[j]) ++count;
  }
  return count;
}

bool precedes(const ResponsePattern& r, const ResponsePattern& other) {
  require_same_dimension(r, other);
  for (std::size_t j = 0; j < r.size(); ++j) {
    if (r[j] && !other[j]) return false;
  }
  return true;
}

Permutation::Permutation(std::vector<std::size_t> order, ResponsePattern base)
    : order_(std::move(order)), base_(std::move(base)) {
  const std::size_t d = base_.size();
  if (order_.size() != d) {
    throw ConfigError("permutation for pattern " + base_.to_string() + " has length " +
                      std::to_string(order_.size()) + ", expected " + std::to_string(d));
  }
  std::vector<bool> seen(d, false);
  for (auto idx : order_) {
    if (idx >= d || seen[idx]) {
      throw ConfigError("permutation for pattern " + base_.to_string() +
                        " is not a bijection on 1..d");
    }
    seen[idx] = true;
  }
  const std::size_t observed = base_.observed_count();
  for (std::size_t p = 0; p < observed; ++p) {
    if (!base_[order_[p]]) {
      throw ConfigError("permutation for pattern " + base_.to_string() +
                        " must list the observed indices first");
    }
  }
}

Permutation Permutation::from_one_based(std::span<const std::size_t> order,
                                        const ResponsePattern& base) {
  std::vector<std::size_t> zero_based;
  zero_based.reserve(order.size());
  for (auto idx : order) {
    if (idx == 0) {
      throw ConfigError("permutation indices are 1-based; got 0 for pattern " +
                        base.to_string());
    }
    zero_based.push_back(idx - 1);
  }
  return Permutation(std::move(zero_based), base);
}

std::vector<std::size_t> Permutation::one_based() const {
  std::vector<std::size_t> out(order_);
  for (auto& idx : out) ++idx;
  return out;
}

ResponsePattern Permutation::prefix_pattern(std::size_t j) const {
  std::vector<std::uint8_t> bits(order_.size(), 0);
  for (std::size_t p = 0; p < j && p < order_.size(); ++p) bits[order_[p]] = 1;
  return ResponsePattern(std::move(bits));
}

Permutation default_permutation(const ResponsePattern& r) {
  std::vector<std::size_t> order = r.observed_indices();
  const auto missing = r.missing_indices();
  order.insert(order.end(), missing.begin(), missing.end());
  return Permutation(std::move(order), r);
}

std::vector<ResponsePattern> potential_donors(const Permutation& pi, std::size_t j) {
  const std::size_t d = pi.size();
  const std::size_t observed = pi.base_pattern().observed_count();
  if (j <= observed || j > d) {
    throw ConfigError("donor step j=" + std::to_string(j) + " out of range (" +
                      std::to_string(observed) + ", " + std::to_string(d) + "] for pattern " +
                      pi.base_pattern().to_string());
  }
  const ResponsePattern floor = pi.prefix_pattern(j);
  const auto free = floor.missing_indices();
  std::vector<ResponsePattern> out;
  out.reserve(std::size_t{1} << free.size());
  std::vector<std::uint8_t> bits(floor.bits().begin(), floor.bits().end());
  for (std::size_t mask = 0; mask < (std::size_t{1} << free.size()); ++mask) {
    for (std::size_t b = 0; b < free.size(); ++b) {
      bits[free[b]] = static_cast<std::uint8_t>((mask >> b) & 1U);
    }
    out.emplace_back(bits);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::vector<std::size_t>> detect_monotone(
    std::span<const ResponsePattern> patterns) {
  std::vector<std::size_t> times;
  times.reserve(patterns.size());
  for (const auto& r : patterns) {
    const std::size_t t = r.observed_count();
    for (std::size_t j = 0; j < r.size(); ++j) {
      if (r[j] != (j < t)) return std::nullopt;
    }
    times.push_back(t);
  }
  return times;
}

std::map<ResponsePattern, std::size_t> pattern_counts(
    std::span<const ResponsePattern> patterns) {
  std::map<ResponsePattern, std::size_t> counts;
  for (const auto& r : patterns) ++counts[r];
  return counts;
}

}  // namespace npmix
