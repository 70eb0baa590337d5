#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recur/maps.hpp"

namespace recur {

enum class Quantity {
  cylinder_return,
  point_return,
  ball_return,
  repetition,
  complexity,
  lyapunov,
  dimension,
  entropy,
  crosscheck,
};

std::string_view to_string(Quantity q);
std::optional<Quantity> parse_quantity(std::string_view text);
std::vector<Quantity> all_quantities();

struct MapSpec {
  std::string name;
  std::vector<double> params;

  friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

/// "name" or "name:p1,p2,...". The rotation accepts "golden" for
/// (sqrt(5) - 1) / 2.
MapSpec parse_map_spec(std::string_view text);
std::string format_map_spec(const MapSpec& spec);

struct Budgets {
  /// Multiplier on the default point and ball iteration budgets.
  double budget_scale = 1.0;
  std::size_t piece_cap = 100'000;
  /// Largest start position searched for a repetition.
  std::uint64_t scan_limit = 100'000'000;
  /// Orbit length for the Birkhoff reference average.
  std::uint64_t birkhoff_length = 100'000;
  /// Coded word length for complexity.
  std::size_t word_length = 100'000;
};

struct ExperimentConfig {
  MapSpec map{"tripling", {}};
  std::size_t seeds = 8;
  std::uint64_t master_seed = 1;
  /// Radii, stored strictly decreasing.
  std::vector<double> r_grid;
  /// Word lengths, stored strictly increasing.
  std::vector<std::size_t> n_grid;
  Budgets budgets;
  std::filesystem::path out = "recur-out";
  std::set<Quantity> quantities;
  /// 0 picks the hardware concurrency.
  std::size_t workers = 0;
};

/// Parses and validates a config document. Collects every problem and throws
/// ConfigError listing them all.
ExperimentConfig config_from_json(const nlohmann::json& doc);
/// Canonical form: fixed key order, grids normalized. Omits out and workers,
/// which do not affect numeric results.
nlohmann::ordered_json canonical_json(const ExperimentConfig& config);
/// Re-validates a config assembled in code (e.g. after CLI overrides).
void validate(ExperimentConfig& config);
/// Hex SHA-256 of canonical_json(config).dump().
std::string config_hash(const ExperimentConfig& config);

/// Prerequisite quantities, e.g. crosscheck needs lyapunov, entropy and
/// dimension.
std::vector<Quantity> prerequisites(Quantity q);

enum class ExitStatus : int { ok = 0, invalid_config = 1, degraded = 2, failed = 3 };

struct ExperimentResult {
  ExitStatus status = ExitStatus::ok;
  std::vector<std::string> files;
  std::vector<std::string> problems;
};

/// Runs every requested quantity for each derived seed and writes
/// series_seed_<i>.csv, estimate_<quantity>.json, report_complexity.json and
/// manifest.json into config.out. Seeds run on a bounded worker pool; output
/// bytes do not depend on scheduling.
ExperimentResult run_experiment(const ExperimentConfig& config);

/// The per-seed rng seed used for ensemble member i.
std::uint64_t ensemble_seed(std::uint64_t master_seed, std::size_t index);

}  // namespace recur
