#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "npmix/dataio.hpp"

namespace npmix::app {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kInputError = 2,
  kEstimationFailure = 3,
};

struct RunOptions {
  std::filesystem::path data;
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;  // empty: config "output", else results.json
  unsigned threads = 1;
  std::optional<std::filesystem::path> export_completed;
  bool uncoupled = false;
};

struct SimulateOptions {
  std::filesystem::path config;
  std::filesystem::path out;
  std::optional<std::uint64_t> seed;
};

// One restriction through validate -> complete -> functionals -> bootstrap.
// Estimation problems are captured in the outcome rather than thrown.
RestrictionOutcome estimate_restriction(const ObservedSample& sample, const RunConfig& config,
                                        const RestrictionSpec& spec, std::uint64_t seed,
                                        unsigned threads);

// Every configured restriction on the same data. Coupled runs share the
// master seed; uncoupled runs give restriction k the seed derive_seed(seed, k).
ResultsDocument run_analysis(const ObservedSample& sample, const RunConfig& config,
                             std::uint64_t seed, unsigned threads, bool coupled = true);

// Estimates and intervals to 4 significant digits.
std::string summary_table(const ResultsDocument& document);

int cmd_estimate(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_sensitivity(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_validate(const RunOptions& options, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace npmix::app
