#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "npmix/patterns.hpp"

namespace npmix {

enum class RestrictionKind { CC, AC, NC, kNC, Custom };

// Sorted set of dropout times (monotone donor set A_ts).
using DonorTimes = std::vector<std::size_t>;
// Sorted set of response patterns (nonmonotone donor set A(r, π_{≤j})).
using DonorPatterns = std::vector<ResponsePattern>;

// Donor rule for monotone missingness. Times are 1-based dropout times as in
// T = |r|; t = 0 is the all-missing pattern.
struct MonotoneRestriction {
  RestrictionKind kind = RestrictionKind::AC;
  std::size_t k = 0;
  // Keyed by (t, s).
  std::map<std::pair<std::size_t, std::size_t>, DonorTimes> custom;

  static MonotoneRestriction cc() { return {RestrictionKind::CC, 0, {}}; }
  static MonotoneRestriction ac() { return {RestrictionKind::AC, 0, {}}; }
  static MonotoneRestriction nc() { return {RestrictionKind::NC, 0, {}}; }
  static MonotoneRestriction knc(std::size_t k);
  static MonotoneRestriction custom_map(
      std::map<std::pair<std::size_t, std::size_t>, DonorTimes> map);
};

// Donor rule for arbitrary (nonmonotone) missingness. Each pattern r is
// extrapolated along a permutation π^(r); patterns without an explicit
// override use default_permutation(r).
struct NonmonotoneRestriction {
  RestrictionKind kind = RestrictionKind::AC;
  std::size_t k = 0;
  // Keyed by (r, j) with j 1-based.
  std::map<std::pair<ResponsePattern, std::size_t>, DonorPatterns> custom;
  std::map<ResponsePattern, Permutation> permutations;

  static NonmonotoneRestriction of_kind(RestrictionKind kind, std::size_t k = 0);

  Permutation permutation_for(const ResponsePattern& r) const;
};

// A_ts for 0 ≤ t < s ≤ d.
DonorTimes monotone_donor_times(const MonotoneRestriction& restriction, std::size_t t,
                                std::size_t s, std::size_t d);

// A(r, π^(r)_{≤j}) for |r| < j ≤ d, enumerated over {0,1}^d.
DonorPatterns nonmonotone_donor_patterns(const NonmonotoneRestriction& restriction,
                                         const ResponsePattern& r, std::size_t j);

// Membership test equivalent to searching nonmonotone_donor_patterns(r, j),
// without enumerating 𝒟.
bool is_donor_pattern(const NonmonotoneRestriction& restriction, const Permutation& pi,
                      std::size_t j, const ResponsePattern& candidate);

class Restriction {
 public:
  Restriction(MonotoneRestriction r, std::string label);
  Restriction(NonmonotoneRestriction r, std::string label);

  bool is_monotone() const noexcept {
    return std::holds_alternative<MonotoneRestriction>(rule_);
  }
  const MonotoneRestriction& monotone() const { return std::get<MonotoneRestriction>(rule_); }
  const NonmonotoneRestriction& nonmonotone() const {
    return std::get<NonmonotoneRestriction>(rule_);
  }
  const std::string& label() const noexcept { return label_; }

 private:
  std::variant<MonotoneRestriction, NonmonotoneRestriction> rule_;
  std::string label_;
};

enum class Engine { Auto, Monotone, Nonmonotone };

// Restriction as written in a run config, before the data decide the engine.
struct RestrictionSpec {
  RestrictionKind kind = RestrictionKind::AC;
  std::size_t k = 0;
  std::map<std::pair<std::size_t, std::size_t>, DonorTimes> custom_times;
  std::map<std::pair<ResponsePattern, std::size_t>, DonorPatterns> custom_patterns;

  // "CC", "AC", "NC", "3NC" or "custom".
  std::string label() const;
};

// Picks the monotone machinery when the observed patterns are monotone and
// the engine is Auto or Monotone; otherwise the permutation-based one.
Restriction resolve_restriction(const RestrictionSpec& spec, Engine engine,
                                const std::map<ResponsePattern, Permutation>& permutations,
                                std::span<const ResponsePattern> observed);

struct ValidationEntry {
  std::string step;        // "t=2,s=3" or "r=0100,j=2"
  std::string donor_set;   // "{3}" or "{0101,1111}"
  std::size_t donor_rows = 0;
  std::string problem;     // empty when the donor set is populated

  bool ok() const noexcept { return problem.empty(); }
};

struct ValidationReport {
  std::string restriction;
  bool monotone = false;
  std::vector<ValidationEntry> entries;

  bool clean() const noexcept;
  std::vector<ValidationEntry> problems() const;
  std::string summary() const;
};

// Lists every donor set reachable from the observed patterns and whether it
// intersects the observed data. Never throws for data-dependent problems.
ValidationReport validate_restriction(const Restriction& restriction, std::size_t d,
                                      std::span<const ResponsePattern> observed);

std::string format_times(const DonorTimes& times);
std::string format_patterns(const DonorPatterns& patterns);

}  // namespace npmix
