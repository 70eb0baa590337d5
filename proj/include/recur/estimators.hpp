#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "recur/maps.hpp"
#include "recur/recurrence.hpp"
#include "recur/series.hpp"
#include "recur/symbolic.hpp"

namespace recur {

struct Fit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

/// Ordinary least squares of ys on xs. Needs two or more points and
/// non-constant xs.
Fit fit_loglog(std::span<const double> xs, std::span<const double> ys);

struct Estimate {
  std::string method;
  double value = 0.0;
  Fit fit;
  /// Range of the scale coordinate actually used (radii or word lengths).
  double scale_min = 0.0;
  double scale_max = 0.0;
  std::size_t n_samples = 0;
  /// min over rows of value / (-log r) for ball returns (liminf side).
  std::optional<double> lower_envelope;
  std::vector<std::string> flags;
};

struct SeedFailure {
  std::uint64_t seed = 0;
  std::string reason;
};

struct AggregateEstimate {
  std::string method;
  std::vector<Estimate> per_seed;
  std::vector<SeedFailure> failures;
  double mean = 0.0;
  /// Interquartile range of the per-seed values.
  double spread = 0.0;
};

/// Mean and interquartile range over per-seed estimates. Throws if empty.
AggregateEstimate aggregate_estimates(std::string method, std::vector<Estimate> per_seed,
                                      std::vector<SeedFailure> failures = {});

/// (1/n) sum log|T'| along a typical orbit per seed. Seeds that hit a
/// critical point or leave the materialized branches are reported as failures.
AggregateEstimate lyapunov_birkhoff(const IntervalMap& map, std::span<const std::uint64_t> seeds,
                                    std::uint64_t n);

/// Inverse slope of tau(B_r) against -log r. Refuses zero-entropy series.
Estimate lyapunov_from_ball_returns(const ReturnSeries& series);

/// Slope of log tau_r against -log r. Refuses zero-entropy series.
Estimate dimension_from_point_returns(const ReturnSeries& series);

/// log(R_n)/n per word at the largest n that every word completed.
AggregateEstimate entropy_ow(std::span<const SymbolSequence> words,
                             std::span<const std::size_t> n_values,
                             std::uint64_t scan_limit = kUnlimited);

/// Same estimator on branch codings of typical orbits, generated lazily
/// until every repetition is found or scan_limit is reached.
AggregateEstimate entropy_ow_orbits(const IntervalMap& map, std::span<const std::uint64_t> seeds,
                                    std::span<const std::size_t> n_values,
                                    std::uint64_t scan_limit);

/// Entropy from per-seed repetition series sharing one grid of word lengths.
/// Scan-limit rows lower the reported n; a seed whose orbit hit a map error
/// before that n is moved to the failures.
AggregateEstimate entropy_from_repetition_series(std::span<const ReturnSeries> series,
                                                std::vector<SeedFailure> failures = {});

inline constexpr std::size_t kMinBallCount = 50;

/// Slope of log mu(B_r(x)) against log r with mu estimated by orbit
/// occupation. Scales holding fewer than 50 orbit points are flagged
/// under-resolved; r >= 1 (or mass 1) is flagged saturated.
Estimate local_dimension_from_measure(const Orbit& orbit, double x,
                                      std::span<const double> scales);

struct CrosscheckReport {
  double entropy = 0.0;
  double lyapunov = 0.0;
  double dimension = 0.0;
  double ratio = 0.0;        // entropy / lyapunov
  double discrepancy = 0.0;  // dimension - ratio
  double tolerance = 0.0;
  bool within = false;
};

CrosscheckReport hofbauer_crosscheck(double entropy, double lyapunov, double dimension,
                                     double tolerance = 0.15);
CrosscheckReport hofbauer_crosscheck(const Estimate& h, const Estimate& lambda, const Estimate& d,
                                     double tolerance = 0.15);

}  // namespace recur
