#include "npmix_app/simulate.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"
#include "npmix/dataio.hpp"
#include "npmix/error.hpp"
#include "npmix/rng.hpp"

namespace npmix::app {

using json = nlohmann::json;

namespace {

Hazard parse_hazard(const json& j, const std::string& field) {
  if (!j.is_object()) throw ConfigError(field + ": expected an object");
  Hazard h;
  h.constant.reset();
  if (j.contains("constant")) {
    h.constant = j.at("constant").get<double>();
    return h;
  }
  h.intercept = j.value("intercept", 0.0);
  h.slope = j.value("slope", 0.0);
  h.center = j.value("center", 0.0);
  return h;
}

void validate_hazard(const Hazard& h, const std::string& where) {
  if (h.constant) {
    if (!(*h.constant >= 0.0 && *h.constant <= 1.0)) {
      throw ConfigError(where + ": constant hazard must lie in [0, 1]");
    }
  } else if (!std::isfinite(h.intercept) || !std::isfinite(h.slope) ||
             !std::isfinite(h.center)) {
    throw ConfigError(where + ": hazard coefficients must be finite");
  }
}

std::string csv_value(double x, const std::string& marker) {
  return std::isnan(x) ? marker : format_double(x);
}

void write_csv(const SimulatedTrial& trial, const SimulationConfig& config,
               const std::vector<double>& values, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  const std::size_t d = config.d;
  out << config.id_column << ',' << config.group_column;
  for (const auto& v : trial.schema.variables) out << ',' << v.name;
  out << '\n';
  for (std::size_t i = 0; i < trial.rows(); ++i) {
    out << trial.ids[i] << ',' << trial.arms[i];
    for (std::size_t j = 0; j < d; ++j) {
      out << ',' << csv_value(values[i * d + j], config.missing_marker);
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing " + path.string());
}

}  // namespace

double Hazard::probability(double last_value) const {
  if (constant) return *constant;
  return 1.0 / (1.0 + std::exp(-(intercept + slope * (last_value - center))));
}

void SimulationConfig::validate() const {
  if (d == 0) throw ConfigError("simulation: d must be >= 1");
  if (arms.empty()) throw ConfigError("simulation: at least one arm is required");
  if (!(sd > 0.0)) throw ConfigError("simulation: sd must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("simulation: rho must lie in (-1, 1)");
  validate_hazard(hazard, "simulation.hazard");
  if (!pattern_probabilities.empty()) {
    double total = 0.0;
    for (const auto& [r, p] : pattern_probabilities) {
      if (r.size() != d) {
        throw ConfigError("simulation.patterns: " + r.to_string() + " does not have length d");
      }
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("simulation.patterns: probability of " + r.to_string() +
                          " outside [0, 1]");
      }
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw ConfigError("simulation.patterns: probabilities sum to " + format_double(total));
    }
  }
  std::vector<std::string> names;
  for (const auto& arm : arms) {
    const std::string where = "simulation.arms." + arm.name;
    if (arm.name.empty()) throw ConfigError("simulation: arm without a name");
    if (std::find(names.begin(), names.end(), arm.name) != names.end()) {
      throw ConfigError(where + ": duplicate arm name");
    }
    names.push_back(arm.name);
    if (arm.n == 0) throw ConfigError(where + ": n must be >= 1");
    if (arm.means.size() != d) throw ConfigError(where + ": means must have length d");
    if (arm.sd && !(*arm.sd > 0.0)) throw ConfigError(where + ": sd must be positive");
    if (arm.rho && !(*arm.rho > -1.0 && *arm.rho < 1.0)) {
      throw ConfigError(where + ": rho must lie in (-1, 1)");
    }
    if (arm.hazard) validate_hazard(*arm.hazard, where + ".hazard");
  }
}

SimulationConfig parse_simulation_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("simulation config is not valid JSON: ") + e.what());
  }
  SimulationConfig c;
  try {
    c.d = j.at("d").get<std::size_t>();
    c.seed = j.value("seed", std::uint64_t{1});
    c.sd = j.value("sd", 1.0);
    c.rho = j.value("rho", 0.0);
    if (j.contains("hazard")) c.hazard = parse_hazard(j.at("hazard"), "simulation.hazard");
    if (j.contains("hazard") && j.contains("patterns")) {
      throw ConfigError("simulation: give either \"hazard\" or \"patterns\", not both");
    }
    if (j.contains("patterns")) {
      for (const auto& [key, p] : j.at("patterns").items()) {
        c.pattern_probabilities[ResponsePattern::from_string(key)] = p.get<double>();
      }
    }
    c.group_column = j.value("group_column", c.group_column);
    c.id_column = j.value("id_column", c.id_column);
    c.missing_marker = j.value("missing_marker", c.missing_marker);
    if (j.contains("arms")) {
      for (const auto& a : j.at("arms")) {
        ArmSpec arm;
        arm.name = a.at("name").get<std::string>();
        arm.n = a.at("n").get<std::size_t>();
        arm.means = a.at("means").get<std::vector<double>>();
        if (a.contains("sd")) arm.sd = a.at("sd").get<double>();
        if (a.contains("rho")) arm.rho = a.at("rho").get<double>();
        if (a.contains("hazard")) {
          arm.hazard = parse_hazard(a.at("hazard"), "simulation.arms." + arm.name + ".hazard");
        }
        c.arms.push_back(std::move(arm));
      }
    } else {
      ArmSpec arm;
      arm.name = "A";
      arm.n = j.at("n").get<std::size_t>();
      arm.means = j.at("means").get<std::vector<double>>();
      c.arms.push_back(std::move(arm));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("simulation config: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(std::string("simulation config: ") + e.what());
  }
  c.validate();
  return c;
}

SimulationConfig load_simulation_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_simulation_config(os.str());
}

SimulationConfig single_arm_config(std::size_t n, std::vector<double> means, double sd,
                                   double rho, Hazard hazard, std::uint64_t seed) {
  SimulationConfig c;
  c.d = means.size();
  c.seed = seed;
  c.sd = sd;
  c.rho = rho;
  c.hazard = hazard;
  c.arms.push_back({"A", n, std::move(means), std::nullopt, std::nullopt, std::nullopt});
  c.validate();
  return c;
}

ObservedSample SimulatedTrial::observed() const {
  return ObservedSample(schema, masked, {{schema.group_columns.front(), arms}}, ids);
}

ObservedSample SimulatedTrial::complete_data() const {
  return ObservedSample(schema, full, {{schema.group_columns.front(), arms}}, ids);
}

SimulatedTrial simulate_trial(const SimulationConfig& config) {
  config.validate();
  const std::size_t d = config.d;
  SimulatedTrial trial;
  trial.schema = Schema::continuous(d);
  trial.schema.group_columns = {config.group_column};
  trial.schema.id_column = config.id_column;

  std::size_t total = 0;
  for (const auto& arm : config.arms) total += arm.n;
  trial.overall_means.assign(d, 0.0);

  std::vector<std::pair<ResponsePattern, double>> table(config.pattern_probabilities.begin(),
                                                        config.pattern_probabilities.end());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::size_t id = 0;
  for (std::size_t a = 0; a < config.arms.size(); ++a) {
    const auto& arm = config.arms[a];
    const double sd = arm.sd.value_or(config.sd);
    const double rho = arm.rho.value_or(config.rho);
    const Hazard& hazard = arm.hazard ? *arm.hazard : config.hazard;
    trial.arm_means[arm.name] = arm.means;
    for (std::size_t j = 0; j < d; ++j) {
      trial.overall_means[j] += arm.means[j] * static_cast<double>(arm.n) / total;
    }
    for (std::size_t i = 0; i < arm.n; ++i) {
      Rng rng(derive_seed(config.seed, a, i));
      normal.reset();
      std::vector<double> x(d);
      double e = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double z = normal(rng);
        e = j == 0 ? sd * z : rho * e + std::sqrt(1.0 - rho * rho) * sd * z;
        x[j] = arm.means[j] + e;
      }
      std::vector<double> masked = x;
      if (table.empty()) {
        std::size_t T = 1;
        while (T < d && !(rng.uniform() < hazard.probability(x[T - 1]))) ++T;
        for (std::size_t j = T; j < d; ++j) masked[j] = std::numeric_limits<double>::quiet_NaN();
      } else {
        const double u = rng.uniform();
        double cumulative = 0.0;
        const ResponsePattern* chosen = &table.back().first;
        for (const auto& [r, p] : table) {
          cumulative += p;
          if (u < cumulative) {
            chosen = &r;
            break;
          }
        }
        for (std::size_t j = 0; j < d; ++j) {
          if (!(*chosen)[j]) masked[j] = std::numeric_limits<double>::quiet_NaN();
        }
      }
      trial.full.insert(trial.full.end(), x.begin(), x.end());
      trial.masked.insert(trial.masked.end(), masked.begin(), masked.end());
      trial.arms.push_back(arm.name);
      trial.ids.push_back(std::to_string(++id));
    }
  }
  return trial;
}

void write_trial(const SimulatedTrial& trial, const SimulationConfig& config,
                 const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  write_csv(trial, config, trial.full, directory / "full.csv");
  write_csv(trial, config, trial.masked, directory / "masked.csv");

  json truth;
  truth["d"] = config.d;
  truth["seed"] = config.seed;
  truth["variables"] = json::array();
  for (const auto& v : trial.schema.variables) truth["variables"].push_back(v.name);
  truth["arm_means"] = trial.arm_means;
  truth["overall_means"] = trial.overall_means;
  json differences = json::object();
  const auto& reference = config.arms.front();
  for (std::size_t a = 1; a < config.arms.size(); ++a) {
    std::vector<double> diff(config.d);
    for (std::size_t j = 0; j < config.d; ++j) {
      diff[j] = config.arms[a].means[j] - reference.means[j];
    }
    differences[config.arms[a].name + "-" + reference.name] = diff;
  }
  truth["mean_differences"] = differences;
  std::ofstream out(directory / "truth.json");
  if (!out) throw DataError("cannot write " + (directory / "truth.json").string());
  out << truth.dump(2) << '\n';
}

}  // namespace npmix::app
