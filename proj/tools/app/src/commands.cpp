#include <cmath>
#include <cstdio>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "npmix/bootstrap.hpp"
#include "npmix/cc_oracle.hpp"
#include "npmix/error.hpp"
#include "npmix/pipeline.hpp"
#include "npmix/rng.hpp"
#include "npmix_app/cli.hpp"
#include "npmix_app/simulate.hpp"

namespace npmix::app {

namespace {

std::string sig4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::filesystem::path output_path(const RunOptions& options, const RunConfig& config) {
  if (!options.out.empty()) return options.out;
  if (!config.output.empty()) return config.output;
  return "results.json";
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kEstimationFailure;
  }
}

EstimationSetup make_setup(const ObservedSample& sample, const RunConfig& config,
                           const RestrictionSpec& spec, unsigned threads) {
  const auto permutations = resolve_permutations(config, sample.dims());
  EstimationSetup setup{
      resolve_restriction(spec, config.engine, permutations, sample.patterns()),
      config.bandwidths, config.bandwidth_policy, config.V, config.stratify_by, threads};
  return setup;
}

// Every stratum must have populated donor sets before anything is sampled.
void require_clean(const ObservedSample& sample, const EstimationSetup& setup) {
  for (const auto& [level, rows] : strata(sample, setup.stratify_by)) {
    const auto part = setup.stratify_by ? sample.select(rows) : sample;
    const auto report = validate_restriction(setup.restriction, sample.dims(), part.patterns());
    if (report.clean()) continue;
    std::ostringstream os;
    if (!level.empty()) os << "stratum " << *setup.stratify_by << "=" << level << ": ";
    bool first = true;
    for (const auto& e : report.problems()) {
      os << (first ? "" : "; ") << "no donors for (" << e.step << ")";
      if (!e.donor_set.empty()) os << " with donor set " << e.donor_set;
      first = false;
    }
    throw EstimationError(os.str());
  }
}

void print_validation(const ValidationReport& report, std::ostream& out) {
  out << report.summary() << '\n';
  out << "  " << std::left << std::setw(16) << "step" << std::setw(28) << "donor set"
      << std::setw(12) << "donor rows" << "status\n";
  for (const auto& e : report.entries) {
    out << "  " << std::setw(16) << e.step << std::setw(28) << e.donor_set << std::setw(12)
        << e.donor_rows << (e.ok() ? "ok" : "WARNING: " + e.problem) << '\n';
  }
  out << std::right;
}

}  // namespace

RestrictionOutcome estimate_restriction(const ObservedSample& sample, const RunConfig& config,
                                        const RestrictionSpec& spec, std::uint64_t seed,
                                        unsigned threads) {
  RestrictionOutcome outcome;
  outcome.restriction = spec.label();
  for (const auto& f : config.functionals) outcome.functionals.push_back(f.label());
  for (const auto& f : config.functionals) f.validate(sample.schema());
  try {
    const auto setup = make_setup(sample, config, spec, threads);
    require_clean(sample, setup);
    BootstrapOptions options;
    options.B = config.B;
    options.alpha = config.alpha;
    options.seed = seed;
    options.threads = threads;
    outcome.results = run_bootstrap(sample, setup, config.functionals, options);
  } catch (const EstimationError& e) {
    outcome.error = e.what();
  }
  return outcome;
}

ResultsDocument run_analysis(const ObservedSample& sample, const RunConfig& config,
                             std::uint64_t seed, unsigned threads, bool coupled) {
  ResultsDocument doc;
  doc.seed = seed;
  doc.V = config.V;
  doc.B = config.B;
  doc.alpha = config.alpha;
  for (std::size_t k = 0; k < config.restrictions.size(); ++k) {
    const std::uint64_t s = coupled ? seed : derive_seed(seed, k);
    doc.outcomes.push_back(estimate_restriction(sample, config, config.restrictions[k], s, threads));
  }
  return doc;
}

std::string summary_table(const ResultsDocument& document) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"restriction", "functional", "estimate", "lower", "upper", "note"});
  for (const auto& o : document.outcomes) {
    if (o.error) {
      for (const auto& f : o.functionals) rows.push_back({o.restriction, f, "-", "-", "-", "failed"});
      continue;
    }
    for (const auto& r : o.results) {
      std::string note;
      if (!r.failed.empty()) note = std::to_string(r.failed.size()) + " failed replicate(s)";
      rows.push_back({r.restriction, r.functional, sig4(r.point), sig4(r.interval.lower),
                      sig4(r.interval.upper), note});
    }
  }
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      std::string cell = row[c];
      cell.resize(width[c], ' ');
      line += cell + "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    os << line << '\n';
  }
  return os.str();
}

int cmd_sensitivity(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_config(options.config);
    const auto sample = load_dataset(options.data, config);
    const std::uint64_t seed = options.seed.value_or(config.seed);
    const auto doc = run_analysis(sample, config, seed, options.threads, !options.uncoupled);
    const auto path = output_path(options, config);
    write_results(doc, path);
    out << summary_table(doc);
    out << "results: " << path.string() << " and " << results_table_path(path).string() << '\n';
    int status = kSuccess;
    for (const auto& o : doc.outcomes) {
      if (o.error) {
        err << "restriction " << o.restriction << " failed: " << *o.error << '\n';
        status = kEstimationFailure;
      }
    }
    return status;
  });
}

int cmd_estimate(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_config(options.config);
    if (config.restrictions.size() != 1) {
      err << "error: estimate takes exactly one restriction; use sensitivity for several\n";
      return static_cast<int>(kUsageError);
    }
    const int status = cmd_sensitivity(options, out, err);
    if (status != kSuccess || !options.export_completed) return status;
    const auto sample = load_dataset(options.data, config);
    const auto setup = make_setup(sample, config, config.restrictions.front(), options.threads);
    const auto completed = complete(sample, setup, options.seed.value_or(config.seed));
    write_completed(completed, *options.export_completed);
    out << "completed sample: " << options.export_completed->string() << '\n';
    return static_cast<int>(kSuccess);
  });
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto config = load_simulation_config(options.config);
    if (options.seed) config.seed = *options.seed;
    const auto trial = simulate_trial(config);
    const auto dir = options.out.empty() ? std::filesystem::path(".") : options.out;
    write_trial(trial, config, dir);
    std::size_t missing_rows = 0;
    for (std::size_t i = 0; i < trial.rows(); ++i) {
      for (std::size_t j = 0; j < config.d; ++j) {
        if (std::isnan(trial.masked[i * config.d + j])) {
          ++missing_rows;
          break;
        }
      }
    }
    out << "simulated " << trial.rows() << " rows (d=" << config.d << ", " << config.arms.size()
        << " arm(s), " << missing_rows << " incomplete) into " << dir.string() << '\n';
    return static_cast<int>(kSuccess);
  });
}

int cmd_validate(const RunOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto config = load_config(options.config);
    const auto sample = load_dataset(options.data, config);
    const std::uint64_t seed = options.seed.value_or(config.seed);
    const std::size_t d = sample.dims();
    out << "data: n=" << sample.rows() << ", d=" << d << '\n';

    const auto counts = pattern_counts(sample.patterns());
    if (const auto times = detect_monotone(sample.patterns())) {
      std::map<std::size_t, std::size_t> by_time;
      for (std::size_t t : *times) ++by_time[t];
      out << "monotone missingness; dropout-time distribution:\n  T  count  fraction\n";
      for (const auto& [t, c] : by_time) {
        out << "  " << t << "  " << c << "  " << sig4(static_cast<double>(c) / sample.rows())
            << '\n';
      }
    } else {
      out << "nonmonotone missingness; pattern counts:\n";
      for (const auto& [r, c] : counts) out << "  " << r.to_string() << "  " << c << '\n';
    }

    for (const auto& spec : config.restrictions) {
      EstimationSetup setup = [&] {
        try {
          return make_setup(sample, config, spec, options.threads);
        } catch (const Error& e) {
          throw ConfigError("restriction " + spec.label() + ": " + e.what());
        }
      }();
      for (const auto& [level, rows] : strata(sample, setup.stratify_by)) {
        if (!level.empty()) out << "stratum " << *setup.stratify_by << "=" << level << ": ";
        const auto part = setup.stratify_by ? sample.select(rows) : sample;
        print_validation(validate_restriction(setup.restriction, d, part.patterns()), out);
      }

      const bool all_continuous =
          std::all_of(sample.schema().variables.begin(), sample.schema().variables.end(),
                      [](const Variable& v) { return v.type == VariableType::Continuous; });
      if (d == 2 && spec.kind == RestrictionKind::CC && all_continuous) {
        try {
          setup.stratify_by.reset();
          const auto kernels = compute_bandwidths(sample, config.bandwidths);
          const double oracle = diagnostics::cc_closed_form_mean(sample, kernels);
          const auto completed = complete(sample, setup, seed);
          const auto f = Functional::mean(sample.schema().variables[1].name);
          const double mc = evaluate_functional(completed, f);
          double se = 0.0;
          if (config.V > 1) {
            std::vector<double> per(config.V);
            for (std::size_t v = 0; v < config.V; ++v) per[v] = evaluate_on_completions(completed, f, v, v + 1);
            double m = 0.0;
            for (double x : per) m += x;
            m /= per.size();
            double ss = 0.0;
            for (double x : per) ss += (x - m) * (x - m);
            se = std::sqrt(ss / (per.size() - 1) / per.size());
          }
          out << "CC oracle check: closed-form " << f.label() << " = " << format_double(oracle)
              << ", Monte Carlo (V=" << config.V << ") = " << format_double(mc)
              << ", gap = " << sig4(mc - oracle);
          if (se > 0.0) out << " (" << sig4(std::abs(mc - oracle) / se) << " MC s.e.)";
          out << '\n';
        } catch (const Error& e) {
          out << "CC oracle check skipped: " << e.what() << '\n';
        }
      }
    }
    return static_cast<int>(kSuccess);
  });
}

}  // namespace npmix::app
