#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace npmix {

// Binary response pattern r = (r_1, ..., r_d); r_j = 1 when variable j is
// observed. Written as the string "r1...rd" everywhere in I/O.
class ResponsePattern {
 public:
  ResponsePattern() = default;
  explicit ResponsePattern(std::vector<std::uint8_t> bits);

  static ResponsePattern from_string(std::string_view text);
  static ResponsePattern all_observed(std::size_t d);
  static ResponsePattern all_missing(std::size_t d);
  // Monotone pattern 1...10...0 with `observed` leading ones.
  static ResponsePattern monotone(std::size_t d, std::size_t observed);

  std::size_t size() const noexcept { return bits_.size(); }
  bool observed(std::size_t j) const { return bits_[j] != 0; }
  bool operator[](std::size_t j) const { return bits_[j] != 0; }
  // |r|, the number of observed variables.
  std::size_t observed_count() const noexcept;
  bool complete() const noexcept { return observed_count() == size(); }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::vector<std::size_t> observed_indices() const;
  std::vector<std::size_t> missing_indices() const;

  std::string to_string() const;

  friend auto operator<=>(const ResponsePattern&, const ResponsePattern&) = default;
  friend bool operator==(const ResponsePattern&, const ResponsePattern&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Number of positions where the two patterns disagree.
std::size_t hamming_distance(const ResponsePattern& a, const ResponsePattern& b);

// r ⪯ r': every variable observed under r is also observed under r'.
bool precedes(const ResponsePattern& r, const ResponsePattern& other);

// Ordering of the d variables attached to a base pattern r. The first |r|
// entries are exactly the observed indices of r; the rest give the order in
// which missing variables are extrapolated. Indices are 0-based internally.
class Permutation {
 public:
  Permutation(std::vector<std::size_t> order, ResponsePattern base);

  // Builds from 1-based indices as written in configs.
  static Permutation from_one_based(std::span<const std::size_t> order,
                                    const ResponsePattern& base);

  const std::vector<std::size_t>& order() const noexcept { return order_; }
  const ResponsePattern& base_pattern() const noexcept { return base_; }
  std::size_t size() const noexcept { return order_.size(); }
  std::size_t operator[](std::size_t position) const { return order_[position]; }
  std::vector<std::size_t> one_based() const;

  // Indicator pattern 1[π_{≤j}] of the first j entries (j is a count).
  ResponsePattern prefix_pattern(std::size_t j) const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> order_;
  ResponsePattern base_;
};

// Observed indices ascending, then missing indices ascending.
Permutation default_permutation(const ResponsePattern& r);

// 𝒟(π_{≤j}) = { r' : 1[π_{≤j}] ⪯ r' }, sorted. j is 1-based, |r| < j ≤ d.
std::vector<ResponsePattern> potential_donors(const Permutation& pi, std::size_t j);

// Dropout times T = |r| when every pattern has the form 1...10...0.
std::optional<std::vector<std::size_t>> detect_monotone(
    std::span<const ResponsePattern> patterns);

// Multiplicity of each distinct pattern.
std::map<ResponsePattern, std::size_t> pattern_counts(
    std::span<const ResponsePattern> patterns);

}  // namespace npmix
