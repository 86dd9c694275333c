#include "npmix/restrictions.hpp"

#include <algorithm>
#include <sstream>

#include "npmix/error.hpp"

namespace npmix {

namespace {

std::string step_name(std::size_t t, std::size_t s) {
  return "t=" + std::to_string(t) + ",s=" + std::to_string(s);
}

std::string step_name(const ResponsePattern& r, std::size_t j) {
  return "r=" + r.to_string() + ",j=" + std::to_string(j);
}

}  // namespace

MonotoneRestriction MonotoneRestriction::knc(std::size_t k) {
  if (k == 0) throw ConfigError("kNC requires k >= 1");
  return {RestrictionKind::kNC, k, {}};
}

MonotoneRestriction MonotoneRestriction::custom_map(
    std::map<std::pair<std::size_t, std::size_t>, DonorTimes> map) {
  return {RestrictionKind::Custom, 0, std::move(map)};
}

NonmonotoneRestriction NonmonotoneRestriction::of_kind(RestrictionKind kind, std::size_t k) {
  if (kind == RestrictionKind::kNC && k == 0) throw ConfigError("kNC requires k >= 1");
  NonmonotoneRestriction r;
  r.kind = kind;
  r.k = k;
  return r;
}

Permutation NonmonotoneRestriction::permutation_for(const ResponsePattern& r) const {
  auto it = permutations.find(r);
  if (it != permutations.end()) return it->second;
  return default_permutation(r);
}

DonorTimes monotone_donor_times(const MonotoneRestriction& restriction, std::size_t t,
                                std::size_t s, std::size_t d) {
  if (!(t < s && s <= d)) {
    throw ConfigError("invalid monotone step " + step_name(t, s) + " for d=" +
                      std::to_string(d));
  }
  DonorTimes out;
  switch (restriction.kind) {
    case RestrictionKind::CC:
      out = {d};
      break;
    case RestrictionKind::AC:
      for (std::size_t u = s; u <= d; ++u) out.push_back(u);
      break;
    case RestrictionKind::NC:
      out = {s};
      break;
    case RestrictionKind::kNC:
      for (std::size_t u = s; u <= std::min(s + restriction.k, d); ++u) out.push_back(u);
      break;
    case RestrictionKind::Custom: {
      auto it = restriction.custom.find({t, s});
      if (it == restriction.custom.end()) {
        throw ConfigError("custom donor map has no entry for " + step_name(t, s));
      }
      out = it->second;
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      if (out.empty()) {
        throw ConfigError("custom donor set for " + step_name(t, s) + " is empty");
      }
      if (out.front() < s || out.back() > d) {
        throw ConfigError("custom donor set " + format_times(out) + " for " +
                          step_name(t, s) + " is not within {s,...,d}");
      }
      break;
    }
  }
  return out;
}

bool is_donor_pattern(const NonmonotoneRestriction& restriction, const Permutation& pi,
                      std::size_t j, const ResponsePattern& candidate) {
  const ResponsePattern floor = pi.prefix_pattern(j);
  if (!precedes(floor, candidate)) return false;
  switch (restriction.kind) {
    case RestrictionKind::CC:
      return candidate.complete();
    case RestrictionKind::AC:
      return true;
    case RestrictionKind::NC:
      return candidate == floor;
    case RestrictionKind::kNC:
      return hamming_distance(floor, candidate) <= restriction.k;
    case RestrictionKind::Custom: {
      const auto& r = pi.base_pattern();
      auto it = restriction.custom.find({r, j});
      if (it == restriction.custom.end()) {
        throw ConfigError("custom donor map has no entry for " + step_name(r, j));
      }
      return std::binary_search(it->second.begin(), it->second.end(), candidate);
    }
  }
  return false;
}

DonorPatterns nonmonotone_donor_patterns(const NonmonotoneRestriction& restriction,
                                         const ResponsePattern& r, std::size_t j) {
  const Permutation pi = restriction.permutation_for(r);
  if (restriction.kind == RestrictionKind::Custom) {
    auto it = restriction.custom.find({r, j});
    if (it == restriction.custom.end()) {
      throw ConfigError("custom donor map has no entry for " + step_name(r, j));
    }
    DonorPatterns out = it->second;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.empty()) {
      throw ConfigError("custom donor set for " + step_name(r, j) + " is empty");
    }
    const ResponsePattern floor = pi.prefix_pattern(j);
    for (const auto& p : out) {
      if (p.size() != r.size() || !precedes(floor, p)) {
        throw ConfigError("custom donor pattern " + p.to_string() + " for " +
                          step_name(r, j) + " does not observe the variables " +
                          floor.to_string());
      }
    }
    return out;
  }
  DonorPatterns out;
  for (auto& candidate : potential_donors(pi, j)) {
    if (is_donor_pattern(restriction, pi, j, candidate)) out.push_back(std::move(candidate));
  }
  return out;
}

Restriction::Restriction(MonotoneRestriction r, std::string label)
    : rule_(std::move(r)), label_(std::move(label)) {}

Restriction::Restriction(NonmonotoneRestriction r, std::string label)
    : rule_(std::move(r)), label_(std::move(label)) {}

std::string RestrictionSpec::label() const {
  switch (kind) {
    case RestrictionKind::CC: return "CC";
    case RestrictionKind::AC: return "AC";
    case RestrictionKind::NC: return "NC";
    case RestrictionKind::kNC: return std::to_string(k) + "NC";
    case RestrictionKind::Custom: return "custom";
  }
  return "?";
}

Restriction resolve_restriction(const RestrictionSpec& spec, Engine engine,
                                const std::map<ResponsePattern, Permutation>& permutations,
                                std::span<const ResponsePattern> observed) {
  if (spec.kind == RestrictionKind::kNC && spec.k == 0) {
    throw ConfigError("kNC requires k >= 1");
  }
  const bool data_monotone = detect_monotone(observed).has_value();
  if (engine == Engine::Monotone && !data_monotone) {
    throw ConfigError("engine \"monotone\" requested but the observed patterns are nonmonotone");
  }
  bool use_monotone = data_monotone && engine != Engine::Nonmonotone;
  if (spec.kind == RestrictionKind::Custom) {
    if (!spec.custom_times.empty() && !spec.custom_patterns.empty()) {
      throw ConfigError("custom donor map mixes \"t,s\" and \"r,j\" keys");
    }
    if (!spec.custom_times.empty()) {
      if (!use_monotone) {
        throw ConfigError("custom donor map keyed by dropout times needs monotone data");
      }
    } else {
      use_monotone = false;
    }
  }
  if (use_monotone) {
    MonotoneRestriction m;
    m.kind = spec.kind;
    m.k = spec.k;
    m.custom = spec.custom_times;
    return Restriction(std::move(m), spec.label());
  }
  NonmonotoneRestriction nm;
  nm.kind = spec.kind;
  nm.k = spec.k;
  nm.custom = spec.custom_patterns;
  nm.permutations = permutations;
  return Restriction(std::move(nm), spec.label());
}

bool ValidationReport::clean() const noexcept {
  return std::all_of(entries.begin(), entries.end(),
                     [](const ValidationEntry& e) { return e.ok(); });
}

std::vector<ValidationEntry> ValidationReport::problems() const {
  std::vector<ValidationEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [](const ValidationEntry& e) { return !e.ok(); });
  return out;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  os << "restriction " << restriction << " (" << (monotone ? "monotone" : "nonmonotone")
     << " engine): " << entries.size() << " reachable donor sets";
  const auto bad = problems();
  if (bad.empty()) {
    os << ", all populated";
  } else {
    os << ", " << bad.size() << " problem(s)";
    for (const auto& e : bad) os << "; (" << e.step << ") " << e.problem;
  }
  return os.str();
}

ValidationReport validate_restriction(const Restriction& restriction, std::size_t d,
                                      std::span<const ResponsePattern> observed) {
  ValidationReport report;
  report.restriction = restriction.label();
  report.monotone = restriction.is_monotone();
  const auto counts = pattern_counts(observed);

  if (restriction.is_monotone()) {
    std::map<std::size_t, std::size_t> time_counts;
    for (const auto& [r, c] : counts) {
      if (!detect_monotone(std::span(&r, 1))) {
        report.entries.push_back({"r=" + r.to_string(), "", 0,
                                  "pattern is not monotone; use the nonmonotone engine"});
        continue;
      }
      time_counts[r.observed_count()] += c;
    }
    for (const auto& [t, c] : time_counts) {
      for (std::size_t s = t + 1; s <= d; ++s) {
        ValidationEntry entry;
        entry.step = step_name(t, s);
        try {
          const auto times = monotone_donor_times(restriction.monotone(), t, s, d);
          entry.donor_set = format_times(times);
          for (auto u : times) {
            auto it = time_counts.find(u);
            if (it != time_counts.end()) entry.donor_rows += it->second;
          }
          if (entry.donor_rows == 0) {
            entry.problem = "donor set " + entry.donor_set + " has no observations";
          }
        } catch (const ConfigError& e) {
          entry.problem = e.what();
        }
        report.entries.push_back(std::move(entry));
      }
    }
    return report;
  }

  const auto& rule = restriction.nonmonotone();
  for (const auto& [r, c] : counts) {
    if (r.size() != d) {
      report.entries.push_back({"r=" + r.to_string(), "", 0, "pattern dimension mismatch"});
      continue;
    }
    Permutation pi = default_permutation(r);
    try {
      pi = rule.permutation_for(r);
    } catch (const Error& e) {
      report.entries.push_back({"r=" + r.to_string(), "", 0, e.what()});
      continue;
    }
    for (std::size_t j = r.observed_count() + 1; j <= d; ++j) {
      ValidationEntry entry;
      entry.step = step_name(r, j);
      try {
        const auto base = pi.prefix_pattern(j);
        const std::size_t free_bits = d - base.observed_count();
        if (rule.kind == RestrictionKind::Custom || rule.kind == RestrictionKind::CC ||
            rule.kind == RestrictionKind::NC || free_bits <= 3) {
          entry.donor_set = format_patterns(nonmonotone_donor_patterns(rule, r, j));
        } else if (rule.kind == RestrictionKind::AC) {
          entry.donor_set = "{r' : " + base.to_string() + " <= r'}";
        } else {
          entry.donor_set = "{r' : " + base.to_string() + " <= r', distance <= " +
                            std::to_string(rule.k) + "}";
        }
        for (const auto& [candidate, cc] : counts) {
          if (is_donor_pattern(rule, pi, j, candidate)) entry.donor_rows += cc;
        }
        if (entry.donor_rows == 0) {
          entry.problem = "donor set " + entry.donor_set + " has no observations";
        }
      } catch (const ConfigError& e) {
        entry.problem = e.what();
      }
      report.entries.push_back(std::move(entry));
    }
  }
  return report;
}

std::string format_times(const DonorTimes& times) {
  std::string s = "{";
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(times[i]);
  }
  return s + "}";
}

std::string format_patterns(const DonorPatterns& patterns) {
  std::string s = "{";
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    if (i) s += ',';
    s += patterns[i].to_string();
  }
  return s + "}";
}

}  // namespace npmix
