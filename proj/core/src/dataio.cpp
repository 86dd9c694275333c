#include "npmix/dataio.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"
#include "npmix/error.hpp"

namespace npmix {

using json = nlohmann::json;

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (c == '"') {
      if (quoted && k + 1 < line.size() && line[k + 1] == '"') {
        cell += '"';
        ++k;
      } else {
        quoted = !quoted;
      }
    } else if (c == delimiter && !quoted) {
      cells.push_back(trim(cell));
      cell.clear();
    } else {
      cell += c;
    }
  }
  cells.push_back(trim(cell));
  return cells;
}

std::optional<double> parse_number(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> read_header(const std::filesystem::path& path, char delimiter) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) return split_line(line, delimiter);
  }
  throw DataError(path.string() + " is empty");
}

[[noreturn]] void config_error(const std::string& field, const std::string& message) {
  throw ConfigError("config field \"" + field + "\": " + message);
}

std::size_t positive_count(const json& j, const std::string& field, std::size_t minimum) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) {
    config_error(field, "expected an integer");
  }
  const auto v = j.get<long long>();
  if (v < static_cast<long long>(minimum)) {
    config_error(field, "must be >= " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(v);
}

std::pair<std::size_t, std::size_t> parse_time_key(const std::string& key) {
  const auto comma = key.find(',');
  if (comma == std::string::npos) config_error("restriction.custom", "bad key \"" + key + "\"");
  const auto t = parse_number(trim(key.substr(0, comma)));
  const auto s = parse_number(trim(key.substr(comma + 1)));
  if (!t || !s || *t < 0 || *s < 0 || *t != std::floor(*t) || *s != std::floor(*s)) {
    config_error("restriction.custom", "bad key \"" + key + "\"");
  }
  return {static_cast<std::size_t>(*t), static_cast<std::size_t>(*s)};
}

RestrictionSpec parse_restriction(const json& j, const std::string& field) {
  RestrictionSpec spec;
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "CC") {
      spec.kind = RestrictionKind::CC;
    } else if (name == "AC") {
      spec.kind = RestrictionKind::AC;
    } else if (name == "NC") {
      spec.kind = RestrictionKind::NC;
    } else if (name.size() > 2 && name.ends_with("NC")) {
      const auto k = parse_number(name.substr(0, name.size() - 2));
      if (!k || *k != std::floor(*k)) config_error(field, "unknown restriction \"" + name + "\"");
      if (*k < 1) config_error(field, "kNC requires k >= 1");
      spec.kind = RestrictionKind::kNC;
      spec.k = static_cast<std::size_t>(*k);
    } else {
      config_error(field, "unknown restriction \"" + name + "\"");
    }
    return spec;
  }
  if (!j.is_object() || j.size() != 1) {
    config_error(field, "expected \"CC\", \"AC\", \"NC\", {\"kNC\": k} or {\"custom\": {...}}");
  }
  if (j.contains("kNC")) {
    const auto& k = j.at("kNC");
    if (!k.is_number_integer() || k.get<long long>() < 1) {
      config_error(field + ".kNC", "k >= 1 required");
    }
    spec.kind = RestrictionKind::kNC;
    spec.k = k.get<std::size_t>();
    return spec;
  }
  if (j.contains("custom")) {
    spec.kind = RestrictionKind::Custom;
    const auto& map = j.at("custom");
    if (!map.is_object() || map.empty()) config_error(field + ".custom", "expected a nonempty object");
    for (const auto& [key, value] : map.items()) {
      if (!value.is_array() || value.empty()) {
        config_error(field + ".custom." + key, "expected a nonempty list");
      }
      if (value.front().is_string()) {
        const auto comma = key.find(',');
        if (comma == std::string::npos) config_error(field + ".custom", "bad key \"" + key + "\"");
        const auto r = ResponsePattern::from_string(trim(key.substr(0, comma)));
        const auto jj = parse_number(trim(key.substr(comma + 1)));
        if (!jj || *jj < 1 || *jj != std::floor(*jj)) {
          config_error(field + ".custom", "bad key \"" + key + "\"");
        }
        DonorPatterns patterns;
        for (const auto& p : value) {
          if (!p.is_string()) config_error(field + ".custom." + key, "mixed entry types");
          patterns.push_back(ResponsePattern::from_string(p.get<std::string>()));
          if (patterns.back().size() != r.size()) {
            config_error(field + ".custom." + key, "pattern length mismatch");
          }
        }
        std::sort(patterns.begin(), patterns.end());
        spec.custom_patterns[{r, static_cast<std::size_t>(*jj)}] = std::move(patterns);
      } else {
        DonorTimes times;
        for (const auto& t : value) {
          if (!t.is_number_integer() || t.get<long long>() < 0) {
            config_error(field + ".custom." + key, "expected dropout times");
          }
          times.push_back(t.get<std::size_t>());
        }
        std::sort(times.begin(), times.end());
        spec.custom_times[parse_time_key(key)] = std::move(times);
      }
    }
    if (!spec.custom_times.empty() && !spec.custom_patterns.empty()) {
      config_error(field + ".custom", "mixes \"t,s\" and \"r,j\" keys");
    }
    return spec;
  }
  config_error(field, "expected \"kNC\" or \"custom\"");
}

Functional parse_functional(const json& j, std::size_t index) {
  const std::string field = "functionals[" + std::to_string(index) + "]";
  if (!j.is_object() || j.size() != 1) config_error(field, "expected a single-key object");
  const auto& [kind, arg] = *j.items().begin();
  try {
    if (kind == "mean") return Functional::mean(arg.get<std::string>());
    if (kind == "variance") return Functional::variance(arg.get<std::string>());
    if (kind == "quantile") {
      return Functional::quantile(arg.at("variable").get<std::string>(), arg.at("p").get<double>());
    }
    if (kind == "correlation") {
      if (!arg.is_array() || arg.size() != 2) config_error(field, "expected two variable names");
      return Functional::correlation(arg[0].get<std::string>(), arg[1].get<std::string>());
    }
    if (kind == "mean_difference") {
      return Functional::mean_difference(
          arg.at("variable").get<std::string>(), arg.at("group").get<std::string>(),
          arg.at("a").get<std::string>(), arg.at("b").get<std::string>());
    }
  } catch (const json::exception& e) {
    config_error(field + "." + kind, e.what());
  } catch (const ConfigError& e) {
    config_error(field + "." + kind, e.what());
  }
  config_error(field, "unknown functional \"" + kind + "\"");
}

Variable parse_variable(const json& j, std::size_t index) {
  const std::string field = "variables[" + std::to_string(index) + "]";
  if (j.is_string()) return {j.get<std::string>(), VariableType::Continuous, {}};
  if (!j.is_object() || !j.contains("name")) config_error(field, "expected a name or object");
  Variable v;
  v.name = j.at("name").get<std::string>();
  const auto type = j.value("type", std::string("continuous"));
  if (type == "continuous") {
    v.type = VariableType::Continuous;
  } else if (type == "categorical") {
    v.type = VariableType::Categorical;
    if (!j.contains("levels") || !j.at("levels").is_array() || j.at("levels").empty()) {
      config_error(field + ".levels", "categorical variables need a nonempty level list");
    }
    for (const auto& level : j.at("levels")) {
      v.levels.push_back(level.is_string() ? level.get<std::string>() : level.dump());
    }
  } else {
    config_error(field + ".type", "expected \"continuous\" or \"categorical\"");
  }
  return v;
}

json result_to_json(const BootstrapResult& r) {
  return json{{"functional", r.functional},
              {"restriction", r.restriction},
              {"point", r.point},
              {"lower", r.interval.lower},
              {"upper", r.interval.upper},
              {"alpha", r.alpha},
              {"B", r.B},
              {"V", r.V},
              {"seed", r.seed},
              {"failed_replicates", r.failed},
              {"replicates", r.replicates}};
}

BootstrapResult result_from_json(const json& j) {
  BootstrapResult r;
  r.functional = j.at("functional").get<std::string>();
  r.restriction = j.at("restriction").get<std::string>();
  r.point = j.at("point").get<double>();
  r.interval = {j.at("lower").get<double>(), j.at("upper").get<double>()};
  r.alpha = j.at("alpha").get<double>();
  r.B = j.at("B").get<std::size_t>();
  r.V = j.at("V").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.failed = j.at("failed_replicates").get<std::vector<std::size_t>>();
  r.replicates = j.at("replicates").get<std::vector<double>>();
  return r;
}

std::string csv_cell(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  static const std::set<std::string> known = {
      "variables", "group_columns", "id_column", "missing_marker", "delimiter",
      "restriction", "restrictions", "permutations", "engine", "bandwidths",
      "bandwidth_policy", "stratify_by", "V", "B", "alpha", "seed", "functionals", "output"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) config_error(key, "unknown field");
  }

  RunConfig c;
  try {
    if (j.contains("variables")) {
      const auto& vars = j.at("variables");
      if (!vars.is_array() || vars.empty()) config_error("variables", "expected a nonempty list");
      for (std::size_t k = 0; k < vars.size(); ++k) c.variables.push_back(parse_variable(vars[k], k));
    }
    if (j.contains("group_columns")) {
      c.group_columns = j.at("group_columns").get<std::vector<std::string>>();
    }
    if (j.contains("id_column")) c.id_column = j.at("id_column").get<std::string>();
    if (j.contains("missing_marker")) c.missing_marker = j.at("missing_marker").get<std::string>();
    if (j.contains("delimiter")) {
      const auto d = j.at("delimiter").get<std::string>();
      if (d.size() != 1) config_error("delimiter", "expected a single character");
      c.delimiter = d.front();
    }

    if (j.contains("restriction") && j.contains("restrictions")) {
      config_error("restrictions", "give either \"restriction\" or \"restrictions\", not both");
    }
    if (j.contains("restriction")) {
      c.restrictions.push_back(parse_restriction(j.at("restriction"), "restriction"));
    } else if (j.contains("restrictions")) {
      const auto& list = j.at("restrictions");
      if (!list.is_array() || list.empty()) config_error("restrictions", "expected a nonempty list");
      for (std::size_t k = 0; k < list.size(); ++k) {
        c.restrictions.push_back(
            parse_restriction(list[k], "restrictions[" + std::to_string(k) + "]"));
      }
    } else {
      config_error("restriction", "required");
    }

    if (j.contains("permutations")) {
      for (const auto& [key, value] : j.at("permutations").items()) {
        const auto r = ResponsePattern::from_string(key);
        auto order = value.get<std::vector<std::size_t>>();
        if (order.size() != r.size()) {
          config_error("permutations." + key, "has length " + std::to_string(order.size()) +
                                                  ", expected " + std::to_string(r.size()));
        }
        try {
          Permutation::from_one_based(order, r);
        } catch (const Error& e) {
          config_error("permutations." + key, e.what());
        }
        c.permutations[r] = std::move(order);
      }
    }

    if (j.contains("engine")) {
      const auto e = j.at("engine").get<std::string>();
      if (e == "auto") c.engine = Engine::Auto;
      else if (e == "monotone") c.engine = Engine::Monotone;
      else if (e == "nonmonotone") c.engine = Engine::Nonmonotone;
      else config_error("engine", "expected \"auto\", \"monotone\" or \"nonmonotone\"");
    }

    if (j.contains("bandwidths")) {
      const auto& bw = j.at("bandwidths");
      if (bw.contains("auto")) {
        if (bw.at("auto") != "silverman") config_error("bandwidths.auto", "only \"silverman\" is supported");
        c.bandwidths.rule = BandwidthRule::Silverman;
      } else if (bw.contains("fixed")) {
        c.bandwidths.rule = BandwidthRule::Fixed;
        c.bandwidths.fixed = bw.at("fixed").get<std::vector<double>>();
        for (double h : c.bandwidths.fixed) {
          if (!(h > 0.0) || !std::isfinite(h)) config_error("bandwidths.fixed", "bandwidths must be positive");
        }
      } else {
        config_error("bandwidths", "expected {\"auto\": \"silverman\"} or {\"fixed\": [...]}");
      }
    }
    if (j.contains("bandwidth_policy")) {
      const auto p = j.at("bandwidth_policy").get<std::string>();
      if (p == "recompute") c.bandwidth_policy = BandwidthPolicy::Recompute;
      else if (p == "frozen") c.bandwidth_policy = BandwidthPolicy::Frozen;
      else config_error("bandwidth_policy", "expected \"recompute\" or \"frozen\"");
    }
    if (j.contains("stratify_by")) c.stratify_by = j.at("stratify_by").get<std::string>();

    if (j.contains("V")) c.V = positive_count(j.at("V"), "V", 1);
    if (j.contains("B")) c.B = positive_count(j.at("B"), "B", 2);
    if (j.contains("alpha")) {
      c.alpha = j.at("alpha").get<double>();
      if (!(c.alpha > 0.0 && c.alpha < 1.0)) config_error("alpha", "must lie in (0, 1)");
    }
    if (j.contains("seed")) {
      const auto& s = j.at("seed");
      if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
        config_error("seed", "expected a nonnegative integer");
      }
      c.seed = s.get<std::uint64_t>();
    }
    if (!j.contains("functionals")) config_error("functionals", "required");
    const auto& fs = j.at("functionals");
    if (!fs.is_array() || fs.empty()) config_error("functionals", "expected a nonempty list");
    for (std::size_t k = 0; k < fs.size(); ++k) c.functionals.push_back(parse_functional(fs[k], k));
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }

  if (c.stratify_by &&
      std::find(c.group_columns.begin(), c.group_columns.end(), *c.stratify_by) ==
          c.group_columns.end()) {
    config_error("stratify_by", "must name one of group_columns");
  }
  if (!c.variables.empty()) {
    Schema s{c.variables, c.group_columns, c.id_column};
    s.validate();
    for (const auto& [r, order] : c.permutations) {
      if (r.size() != s.dims()) {
        config_error("permutations." + r.to_string(),
                     "pattern length differs from the " + std::to_string(s.dims()) + " variables");
      }
    }
    if (c.bandwidths.rule == BandwidthRule::Fixed && c.bandwidths.fixed.size() != s.dims()) {
      config_error("bandwidths.fixed", "expected " + std::to_string(s.dims()) + " values");
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text);
}

Schema resolve_schema(const RunConfig& config, const std::vector<std::string>& header) {
  Schema schema;
  schema.group_columns = config.group_columns;
  schema.id_column = config.id_column;
  if (!config.variables.empty()) {
    schema.variables = config.variables;
  } else {
    for (const auto& name : header) {
      if (schema.is_group(name) || (schema.id_column && *schema.id_column == name)) continue;
      schema.variables.push_back({name, VariableType::Continuous, {}});
    }
  }
  schema.validate();
  for (const auto& [r, order] : config.permutations) {
    if (r.size() != schema.dims()) {
      throw ConfigError("permutation key " + r.to_string() + " does not match d=" +
                        std::to_string(schema.dims()));
    }
  }
  return schema;
}

ObservedSample load_dataset(const std::filesystem::path& path, const Schema& schema,
                            const DatasetOptions& options) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_line(line, options.delimiter);
      break;
    }
  }
  if (header.empty()) throw DataError(path.string() + " is empty");

  auto column_of = [&](const std::string& name) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == name) return c;
    }
    throw DataError(path.string() + ": header has no column \"" + name + "\"");
  };
  const std::size_t d = schema.dims();
  std::vector<std::size_t> var_cols(d);
  for (std::size_t j = 0; j < d; ++j) var_cols[j] = column_of(schema.variables[j].name);
  std::map<std::string, std::size_t> group_cols;
  for (const auto& g : schema.group_columns) group_cols[g] = column_of(g);
  std::optional<std::size_t> id_col;
  if (schema.id_column) id_col = column_of(*schema.id_column);

  std::vector<double> values;
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& g : schema.group_columns) groups[g];
  std::vector<std::string> ids;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_line(line, options.delimiter);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    }
    for (std::size_t j = 0; j < d; ++j) {
      const auto& cell = cells[var_cols[j]];
      const auto& var = schema.variables[j];
      auto where = [&] {
        return "row " + std::to_string(row) + ", column \"" + var.name + "\"";
      };
      if (cell == options.missing_marker) {
        values.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      if (var.type == VariableType::Categorical) {
        auto it = std::find(var.levels.begin(), var.levels.end(), cell);
        if (it == var.levels.end()) {
          throw DataError(where() + ": unknown categorical level \"" + cell + "\"");
        }
        values.push_back(static_cast<double>(it - var.levels.begin() + 1));
        continue;
      }
      const auto x = parse_number(cell);
      if (!x) throw DataError(where() + ": cannot parse \"" + cell + "\" as a number");
      values.push_back(*x);
    }
    for (const auto& [g, c] : group_cols) {
      if (cells[c] == options.missing_marker || cells[c].empty()) {
        throw DataError("row " + std::to_string(row) + ", column \"" + g +
                        "\": group columns must be fully observed");
      }
      groups[g].push_back(cells[c]);
    }
    if (id_col) {
      if (cells[*id_col] == options.missing_marker || cells[*id_col].empty()) {
        throw DataError("row " + std::to_string(row) + ": id column must be fully observed");
      }
      ids.push_back(cells[*id_col]);
    }
  }
  if (row == 0) throw DataError(path.string() + " has a header but no data rows");
  return ObservedSample(schema, std::move(values), std::move(groups), std::move(ids));
}

ObservedSample load_dataset(const std::filesystem::path& path, const RunConfig& config) {
  const auto header = read_header(path, config.delimiter);
  const Schema schema = resolve_schema(config, header);
  return load_dataset(path, schema, {config.missing_marker, config.delimiter});
}

std::map<ResponsePattern, Permutation> resolve_permutations(const RunConfig& config,
                                                            std::size_t d) {
  std::map<ResponsePattern, Permutation> out;
  for (const auto& [r, order] : config.permutations) {
    if (r.size() != d) {
      throw ConfigError("permutation key " + r.to_string() + " does not match d=" +
                        std::to_string(d));
    }
    out.emplace(r, Permutation::from_one_based(order, r));
  }
  return out;
}

std::filesystem::path results_table_path(const std::filesystem::path& path) {
  auto table = path;
  table.replace_extension(".csv");
  if (table == path) table += ".table.csv";
  return table;
}

void write_results(const ResultsDocument& document, const std::filesystem::path& path) {
  json results = json::array();
  json failures = json::array();
  for (const auto& outcome : document.outcomes) {
    if (outcome.error) {
      failures.push_back({{"restriction", outcome.restriction},
                          {"functionals", outcome.functionals},
                          {"error", *outcome.error}});
      continue;
    }
    for (const auto& r : outcome.results) results.push_back(result_to_json(r));
  }
  const json doc = {{"format", "npmix-results/1"},
                    {"seed", document.seed},
                    {"V", document.V},
                    {"B", document.B},
                    {"alpha", document.alpha},
                    {"results", results},
                    {"failures", failures}};
  {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
    if (!out) throw DataError("failed writing " + path.string());
  }

  const auto table_path = results_table_path(path);
  std::ofstream table(table_path);
  if (!table) throw DataError("cannot write " + table_path.string());
  table << "restriction,functional,estimate,lower,upper,status\n";
  for (const auto& outcome : document.outcomes) {
    if (outcome.error) {
      for (const auto& f : outcome.functionals) {
        table << csv_cell(outcome.restriction) << ',' << csv_cell(f) << ",,,,failed\n";
      }
      continue;
    }
    for (const auto& r : outcome.results) {
      table << csv_cell(r.restriction) << ',' << csv_cell(r.functional) << ','
            << format_double(r.point) << ',' << format_double(r.interval.lower) << ','
            << format_double(r.interval.upper) << ",ok\n";
    }
  }
  if (!table) throw DataError("failed writing " + table_path.string());
}

ResultsDocument read_results(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  ResultsDocument doc;
  doc.seed = j.at("seed").get<std::uint64_t>();
  doc.V = j.at("V").get<std::size_t>();
  doc.B = j.at("B").get<std::size_t>();
  doc.alpha = j.at("alpha").get<double>();
  for (const auto& item : j.at("results")) {
    auto r = result_from_json(item);
    if (doc.outcomes.empty() || doc.outcomes.back().restriction != r.restriction ||
        doc.outcomes.back().error) {
      doc.outcomes.push_back({r.restriction, {}, {}, std::nullopt});
    }
    doc.outcomes.back().functionals.push_back(r.functional);
    doc.outcomes.back().results.push_back(std::move(r));
  }
  for (const auto& item : j.at("failures")) {
    doc.outcomes.push_back({item.at("restriction").get<std::string>(),
                            item.at("functionals").get<std::vector<std::string>>(),
                            {},
                            item.at("error").get<std::string>()});
  }
  return doc;
}

void write_completed(const CompletedSample& completed, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const auto& base = completed.base();
  const auto& schema = base.schema();
  out << "row_id,completion_id,pattern";
  for (const auto& v : schema.variables) out << ',' << csv_cell(v.name);
  out << ",imputed\n";
  for (std::size_t v = 0; v < completed.completions(); ++v) {
    for (std::size_t i = 0; i < completed.rows(); ++i) {
      const auto& r = base.pattern(i);
      out << (base.ids().empty() ? std::to_string(i + 1) : csv_cell(base.ids()[i])) << ','
          << (v + 1) << ',' << r.to_string();
      const auto row = completed.row(v, i);
      std::string mask(r.size(), '0');
      for (std::size_t j = 0; j < row.size(); ++j) {
        const auto& var = schema.variables[j];
        if (var.type == VariableType::Categorical) {
          out << ',' << csv_cell(var.levels[static_cast<std::size_t>(row[j]) - 1]);
        } else {
          out << ',' << format_double(row[j]);
        }
        if (!r[j]) mask[j] = '1';
      }
      out << ',' << mask << '\n';
    }
  }
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace npmix
