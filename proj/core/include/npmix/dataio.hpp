#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "npmix/bootstrap.hpp"
#include "npmix/functional.hpp"
#include "npmix/pipeline.hpp"
#include "npmix/restrictions.hpp"
#include "npmix/sample.hpp"

namespace npmix {

// Everything a run needs besides the data. Read from a JSON document; see
// README.md for the schema.
struct RunConfig {
  // Declared study variables; empty means "every column that is not a group
  // or id column, all continuous".
  std::vector<Variable> variables;
  std::vector<std::string> group_columns;
  std::optional<std::string> id_column;
  std::string missing_marker = "NA";
  char delimiter = ',';

  std::vector<RestrictionSpec> restrictions;
  // 1-based orders keyed by pattern.
  std::map<ResponsePattern, std::vector<std::size_t>> permutations;
  Engine engine = Engine::Auto;

  BandwidthConfig bandwidths;
  BandwidthPolicy bandwidth_policy = BandwidthPolicy::Recompute;
  std::optional<std::string> stratify_by;

  std::size_t V = 100;
  std::size_t B = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 1;
  std::vector<Functional> functionals;
  std::string output;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

struct DatasetOptions {
  std::string missing_marker = "NA";
  char delimiter = ',';
};

// Study variables come from the schema; group and id columns must be fully
// observed. Missing cells become NaN with pattern bit 0.
ObservedSample load_dataset(const std::filesystem::path& path, const Schema& schema,
                            const DatasetOptions& options = {});

// Reads the header, resolves the schema from the config, then loads.
ObservedSample load_dataset(const std::filesystem::path& path, const RunConfig& config);

Schema resolve_schema(const RunConfig& config, const std::vector<std::string>& header);

std::map<ResponsePattern, Permutation> resolve_permutations(const RunConfig& config,
                                                            std::size_t d);

// All results of one restriction, or the reason it could not be estimated.
struct RestrictionOutcome {
  std::string restriction;
  std::vector<std::string> functionals;
  std::vector<BootstrapResult> results;
  std::optional<std::string> error;
};

struct ResultsDocument {
  std::uint64_t seed = 0;
  std::size_t V = 0;
  std::size_t B = 0;
  double alpha = 0.05;
  std::vector<RestrictionOutcome> outcomes;
};

// Writes the JSON document to `path` and the flat table next to it
// (results_table_path(path)).
void write_results(const ResultsDocument& document, const std::filesystem::path& path);
ResultsDocument read_results(const std::filesystem::path& path);
std::filesystem::path results_table_path(const std::filesystem::path& path);

// Long format: row_id, completion_id, pattern, one column per variable,
// imputed (mask of the cells that were filled in).
void write_completed(const CompletedSample& completed, const std::filesystem::path& path);

// Shortest-round-trip-safe decimal form (17 significant digits).
std::string format_double(double x);

}  // namespace npmix
