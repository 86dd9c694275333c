#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "npmix/patterns.hpp"
#include "npmix/sample.hpp"

namespace npmix::app {

// Per-transition dropout probability. For monotone designs the probability of
// leaving after time t (t = 1..d-1), given still present, is
// logistic(intercept + slope * (x_t - center)), or `constant` when set.
// The default is no dropout.
struct Hazard {
  double intercept = 0.0;
  double slope = 0.0;
  double center = 0.0;
  std::optional<double> constant = 0.0;

  double probability(double last_value) const;
};

struct ArmSpec {
  std::string name;
  std::size_t n = 0;
  std::vector<double> means;  // length d
  std::optional<double> sd;
  std::optional<double> rho;
  std::optional<Hazard> hazard;
};

// Gaussian AR(1) trajectories: X_t = mean_t + e_t with sd(e_t) = sd and
// corr(e_s, e_t) = rho^|s-t|. Missingness is either monotone hazard-driven
// dropout or, when `pattern_probabilities` is set, an independent draw from
// the given pattern table.
struct SimulationConfig {
  std::size_t d = 0;
  std::uint64_t seed = 1;
  double sd = 1.0;
  double rho = 0.0;
  Hazard hazard;
  std::map<ResponsePattern, double> pattern_probabilities;
  std::vector<ArmSpec> arms;
  std::string group_column = "arm";
  std::string id_column = "id";
  std::string missing_marker = "NA";

  void validate() const;
};

SimulationConfig parse_simulation_config(std::string_view json_text);
SimulationConfig load_simulation_config(const std::filesystem::path& path);

// Convenience for single-arm designs.
SimulationConfig single_arm_config(std::size_t n, std::vector<double> means, double sd,
                                   double rho, Hazard hazard, std::uint64_t seed);

struct SimulatedTrial {
  Schema schema;
  std::vector<double> full;    // row-major, n x d
  std::vector<double> masked;  // NaN where missing
  std::vector<std::string> arms;
  std::vector<std::string> ids;
  std::map<std::string, std::vector<double>> arm_means;
  std::vector<double> overall_means;

  std::size_t rows() const noexcept { return arms.size(); }
  ObservedSample observed() const;
  ObservedSample complete_data() const;
};

SimulatedTrial simulate_trial(const SimulationConfig& config);

// Writes full.csv, masked.csv and truth.json into `directory`.
void write_trial(const SimulatedTrial& trial, const SimulationConfig& config,
                 const std::filesystem::path& directory);

}  // namespace npmix::app
