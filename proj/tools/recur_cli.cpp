// Command-line front end: explore maps, compute return series, run
// estimators and full experiments.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "recur/complexity.hpp"
#include "recur/error.hpp"
#include "recur/estimators.hpp"
#include "recur/experiment.hpp"
#include "recur/io.hpp"
#include "recur/maps.hpp"
#include "recur/recurrence.hpp"
#include "recur/selftest.hpp"
#include "recur/symbolic.hpp"

namespace {

using namespace recur;

constexpr const char* kConfigHelp = R"(Config file (JSON, see schemas/experiment.schema.json):
  map          "name" or "name:p1,p2" or {"name": ..., "params": [...]}
               (tripling, doubling, tent, logistic:a, gauss[:branches],
                rotation:alpha|golden, manneville-pomeau:s)
  seeds        ensemble size, >= 1
  master_seed  master rng seed; seed i is derived by splitmix64
  r_grid       radii for point/ball returns, strictly sorted
  n_grid       word lengths for cylinder returns and repetition, strictly sorted
  budgets      {budget_scale, piece_cap, scan_limit, birkhoff_length, word_length}
  out          output directory
  quantities   subset of cylinder-return, point-return, ball-return, repetition,
               complexity, lyapunov, dimension, entropy, crosscheck
  workers      worker threads, 0 = hardware concurrency
Flags given on the command line override the file.
Grid lists accept "a,b,c" or "geom:first:last:count".
Exit status: 0 ok, 1 invalid config, 2 degraded (some seeds failed), 3 failed.)";

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  if (text.rfind("geom:", 0) == 0) {
    std::istringstream in(text.substr(5));
    std::string a;
    std::string b;
    std::string k;
    if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, k)) {
      throw CLI::ValidationError("grid", "expected geom:first:last:count");
    }
    const double first = std::stod(a);
    const double last = std::stod(b);
    const int count = std::stoi(k);
    if (count < 1 || !(first > 0.0) || !(last > 0.0)) {
      throw CLI::ValidationError("grid", "geometric grid needs positive ends and count >= 1");
    }
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      out.push_back(first * std::pow(last / first, t));
    }
    return out;
  }
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(std::stod(token));
  }
  return out;
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_real_list(text)) {
    if (!(v >= 1.0) || std::floor(v) != v) throw CLI::ValidationError("n-grid", "expected positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw Error(fmt::format("cannot open {} for writing", path));
  return file;
}

std::vector<std::uint64_t> seed_list(std::uint64_t master, std::size_t count) {
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < count; ++i) seeds.push_back(ensemble_seed(master, i));
  return seeds;
}

int cmd_maps_list() {
  for (const auto& name : builtin_map_names()) {
    std::vector<double> params;
    if (name == "logistic") params = {4.0};
    if (name == "rotation") params = {(std::sqrt(5.0) - 1.0) / 2.0};
    if (name == "manneville-pomeau") params = {0.5};
    const IntervalMap m = make_builtin_map(name, params);
    fmt::print("{:<18} branches={:<8} markov={:<3} orbits={:<9} measure={}\n", name,
               m.branch_count(), m.markov() ? "yes" : "no",
               m.orbit_mode() == OrbitMode::floating ? "floating" : "symbolic",
               m.invariant_measure_id().empty() ? "-" : m.invariant_measure_id());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recurrence times, return-time estimators and LZ76 complexity for interval maps"};
  app.set_version_flag("--version", RECUR_VERSION);
  app.require_subcommand(1);

  // maps list
  auto* maps = app.add_subcommand("maps", "Built-in map families");
  auto* maps_list = maps->add_subcommand("list", "List built-in maps");
  maps->require_subcommand(1);

  // orbit
  std::string map_text = "tripling";
  std::uint64_t seed = 1;
  std::size_t length = 10;
  std::optional<double> x0;
  bool symbols = false;
  std::string out_path;
  auto* orbit = app.add_subcommand("orbit", "Print a measure-typical orbit (or one from --x0)");
  orbit->add_option("--map", map_text, "Map, e.g. logistic:4")->capture_default_str();
  orbit->add_option("--seed", seed, "RNG seed for the initial point")->capture_default_str();
  orbit->add_option("--length", length, "Number of points")->capture_default_str();
  orbit->add_option("--x0", x0, "Start point (floating maps only)");
  orbit->add_flag("--symbols", symbols, "Print the branch coding as one words-file line");
  orbit->add_option("--out", out_path, "Output file (default stdout)");

  // returns
  std::string kind_text = "point-return";
  std::string r_grid_text;
  std::string n_grid_text;
  std::size_t seeds = 1;
  std::uint64_t master_seed = 1;
  double budget_scale = 1.0;
  std::uint64_t scan_limit = 100'000'000;
  auto* returns = app.add_subcommand("returns", "Return-time series as CSV, one block per seed");
  returns->add_option("--map", map_text, "Map")->capture_default_str();
  returns->add_option("--kind", kind_text, "point-return, ball-set-return, cylinder-return or repetition")
      ->capture_default_str();
  returns->add_option("--r-grid", r_grid_text, "Radii (point and ball kinds)");
  returns->add_option("--n-grid", n_grid_text, "Word lengths (cylinder and repetition kinds)");
  returns->add_option("--seeds", seeds, "Ensemble size")->capture_default_str();
  returns->add_option("--master-seed", master_seed, "Master seed")->capture_default_str();
  returns->add_option("--budget-scale", budget_scale, "Budget multiplier")->capture_default_str();
  returns->add_option("--scan-limit", scan_limit, "Repetition scan limit")->capture_default_str();
  returns->add_option("--out", out_path, "Output CSV (default stdout)");

  // estimate
  std::string method = "lyapunov";
  std::string input_path;
  std::string words_path;
  std::uint64_t birkhoff_length = 1'000'000;
  auto* estimate = app.add_subcommand(
      "estimate", "Estimators on CSV series, words files, or (birkhoff) directly on a map");
  estimate->add_option("--method", method,
                       "lyapunov, dimension, entropy (CSV input); entropy, complexity (--words); "
                       "birkhoff (--map)")
      ->capture_default_str();
  estimate->add_option("--input", input_path, "Series CSV");
  estimate->add_option("--words", words_path, "Words file");
  estimate->add_option("--n-grid", n_grid_text, "Word lengths for entropy on --words");
  estimate->add_option("--map", map_text, "Map for birkhoff")->capture_default_str();
  estimate->add_option("--seeds", seeds, "Ensemble size for birkhoff")->capture_default_str();
  estimate->add_option("--master-seed", master_seed, "Master seed for birkhoff")->capture_default_str();
  estimate->add_option("--length", birkhoff_length, "Orbit length for birkhoff")->capture_default_str();
  estimate->add_option("--out", out_path, "Output JSON (default stdout)");

  // experiment
  std::string config_path;
  std::optional<std::string> exp_map;
  std::optional<std::size_t> exp_seeds;
  std::optional<std::uint64_t> exp_master;
  std::optional<std::string> exp_out;
  std::optional<std::string> exp_quantities;
  std::optional<std::string> exp_r;
  std::optional<std::string> exp_n;
  std::optional<double> exp_budget;
  std::optional<std::size_t> exp_workers;
  auto* experiment = app.add_subcommand("experiment", "Run a full configured experiment");
  experiment->add_option("--config", config_path, "JSON config file");
  experiment->add_option("--map", exp_map, "Override map");
  experiment->add_option("--seeds", exp_seeds, "Override ensemble size");
  experiment->add_option("--master-seed", exp_master, "Override master seed");
  experiment->add_option("--out", exp_out, "Override output directory");
  experiment->add_option("--quantities", exp_quantities, "Override quantities (comma list)");
  experiment->add_option("--r-grid", exp_r, "Override r_grid");
  experiment->add_option("--n-grid", exp_n, "Override n_grid");
  experiment->add_option("--budget-scale", exp_budget, "Override budgets.budget_scale");
  experiment->add_option("--workers", exp_workers, "Override worker count");
  experiment->footer(kConfigHelp);

  auto* selftest = app.add_subcommand("selftest", "Check fast kernels against their oracles");

  CLI11_PARSE(app, argc, argv);

  try {
    if (maps_list->parsed()) return cmd_maps_list();

    if (orbit->parsed()) {
      const MapSpec spec = parse_map_spec(map_text);
      const IntervalMap map = make_builtin_map(spec.name, spec.params);
      const Orbit o = x0 ? generate_orbit(map, *x0, length) : generate_typical_orbit(map, seed, length);
      std::ofstream file;
      std::ostream& out = open_output(out_path, file);
      if (symbols) {
        const auto word = encode_branches(map, o);
        for (std::size_t i = 0; i < word.size(); ++i) out << (i ? " " : "") << word[i];
        out << '\n';
      } else {
        for (double p : o.points) out << format_real(p) << '\n';
      }
      return 0;
    }

    if (returns->parsed()) {
      const MapSpec spec = parse_map_spec(map_text);
      const IntervalMap map = make_builtin_map(spec.name, spec.params);
      const auto kind = parse_series_kind(kind_text);
      if (!kind) throw Error(fmt::format("unknown series kind '{}'", kind_text));
      std::vector<ReturnSeries> all;
      for (std::uint64_t s : seed_list(master_seed, seeds)) {
        ReturnSeries series;
        if (*kind == SeriesKind::point_return || *kind == SeriesKind::ball_set_return) {
          auto radii = parse_real_list(r_grid_text);
          std::sort(radii.begin(), radii.end(), std::greater<>());
          ScanOptions opts;
          opts.budget_scale = budget_scale;
          opts.seed = s;
          series = *kind == SeriesKind::point_return
                       ? scan_point_returns(map, typical_orbit(map, s), radii, opts)
                       : scan_scales(*kind, map, typical_orbit(map, s).current(), radii, opts);
        } else {
          auto ns = parse_count_list(n_grid_text);
          std::sort(ns.begin(), ns.end());
          if (ns.empty()) throw Error("--n-grid is required");
          if (*kind == SeriesKind::repetition) {
            series = repetition_series(map, typical_orbit(map, s), ns, scan_limit);
          } else {
            const Orbit o = generate_typical_orbit(map, s, ns.back());
            const Admissibility adm = map.markov() ? Admissibility::markov(markov_matrix(map))
                                                   : Admissibility::full_shift();
            series = return_ratio_series(encode_branches(map, o), ns, adm);
          }
        }
        series.seed = s;
        all.push_back(std::move(series));
      }
      std::ofstream file;
      write_series_csv(open_output(out_path, file), all);
      return 0;
    }

    if (estimate->parsed()) {
      nlohmann::ordered_json result;
      if (method == "birkhoff") {
        const MapSpec spec = parse_map_spec(map_text);
        const IntervalMap map = make_builtin_map(spec.name, spec.params);
        result = to_json(lyapunov_birkhoff(map, seed_list(master_seed, seeds), birkhoff_length));
      } else if (!words_path.empty()) {
        const auto words = read_words(words_path);
        if (words.empty()) throw Error("words file holds no words");
        if (method == "complexity") {
          result = nlohmann::ordered_json::array();
          for (const auto& w : words) result.push_back(to_json(complexity_report(w.symbols())));
        } else if (method == "entropy") {
          const auto ns = parse_count_list(n_grid_text);
          result = to_json(entropy_ow(words, ns));
        } else {
          throw Error(fmt::format("method '{}' does not take --words", method));
        }
      } else {
        if (input_path.empty()) throw Error("--input or --words is required");
        const auto series = read_series_csv(input_path);
        if (method == "entropy") {
          std::vector<ReturnSeries> reps;
          for (const auto& s : series) {
            if (s.kind == SeriesKind::repetition) reps.push_back(s);
          }
          result = to_json(entropy_from_repetition_series(reps));
        } else if (method == "lyapunov" || method == "dimension") {
          std::vector<Estimate> per;
          std::vector<SeedFailure> failures;
          for (const auto& s : series) {
            try {
              per.push_back(method == "lyapunov" ? lyapunov_from_ball_returns(s)
                                                 : dimension_from_point_returns(s));
            } catch (const Error& e) {
              failures.push_back({s.seed, e.what()});
            }
          }
          result = to_json(aggregate_estimates(method, std::move(per), std::move(failures)));
        } else {
          throw Error(fmt::format("unknown method '{}'", method));
        }
      }
      std::ofstream file;
      open_output(out_path, file) << result.dump(2) << '\n';
      return 0;
    }

    if (experiment->parsed()) {
      ExperimentConfig config;
      try {
        nlohmann::json doc = nlohmann::json::object();
        if (!config_path.empty()) {
          std::ifstream in(config_path);
          if (!in) throw ConfigError({fmt::format("cannot read config file {}", config_path)});
          try {
            doc = nlohmann::json::parse(in);
          } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError({fmt::format("config is not valid JSON: {}", e.what())});
          }
        }
        // Overrides are applied to the document so that one validator sees all fields.
        if (exp_map) doc["map"] = *exp_map;
        if (exp_seeds) doc["seeds"] = *exp_seeds;
        if (exp_master) doc["master_seed"] = *exp_master;
        if (exp_out) doc["out"] = *exp_out;
        if (exp_quantities) {
          auto qs = nlohmann::json::array();
          std::istringstream in(*exp_quantities);
          std::string q;
          while (std::getline(in, q, ',')) {
            if (!q.empty()) qs.push_back(q);
          }
          doc["quantities"] = qs;
        }
        if (exp_r) doc["r_grid"] = parse_real_list(*exp_r);
        if (exp_n) doc["n_grid"] = parse_count_list(*exp_n);
        if (exp_budget) doc["budgets"]["budget_scale"] = *exp_budget;
        if (exp_workers) doc["workers"] = *exp_workers;
        config = config_from_json(doc);
      } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return static_cast<int>(ExitStatus::invalid_config);
      }
      const auto result = run_experiment(config);
      for (const auto& p : result.problems) std::cerr << "problem: " << p << '\n';
      fmt::print("wrote {} files to {} (exit status {})\n", result.files.size(),
                 config.out.string(), static_cast<int>(result.status));
      return static_cast<int>(result.status);
    }

    if (selftest->parsed()) {
      bool ok = true;
      for (const auto& check : run_selftest()) {
        fmt::print("{} {:<20} {}\n", check.passed ? "PASS" : "FAIL", check.name, check.detail);
        ok = ok && check.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::cerr << e.what() << '\n';
    return static_cast<int>(ExitStatus::invalid_config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(ExitStatus::failed);
  }
  return 0;
}
