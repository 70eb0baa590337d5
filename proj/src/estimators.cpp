#include "recur/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "recur/error.hpp"

namespace recur {
namespace {

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> sorted, double q) {
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void require_nonzero_entropy(const ReturnSeries& series) {
  if (series.zero_entropy) {
    throw HypothesisError(
        "return-time limit theorems require a measure with non-zero entropy; refusing estimate");
  }
}

struct Columns {
  std::vector<double> radii;
  std::vector<double> values;
};

Columns usable_columns(const ReturnSeries& series, SeriesKind expected) {
  if (series.kind != expected) {
    throw std::invalid_argument(fmt::format("expected a {} series, got {}", to_string(expected),
                                            to_string(series.kind)));
  }
  Columns c;
  for (const auto& row : series.rows) {
    if (!row.usable()) continue;
    c.radii.push_back(row.scale);
    c.values.push_back(static_cast<double>(row.value));
  }
  if (c.radii.size() < 4) {
    throw FitError(fmt::format("need at least 4 usable rows, have {}", c.radii.size()));
  }
  return c;
}

std::vector<std::string> flagged_rows(const ReturnSeries& series) {
  std::vector<std::string> flags;
  for (const auto& row : series.rows) {
    if (!row.usable()) flags.push_back(fmt::format("{}@{:.17g}", to_string(row.flag), row.scale));
  }
  return flags;
}

void require_increasing(std::span<const std::size_t> n_values) {
  if (n_values.empty()) throw std::invalid_argument("need at least one word length");
  for (std::size_t i = 0; i < n_values.size(); ++i) {
    if (n_values[i] == 0) throw std::invalid_argument("word lengths must be positive");
    if (i > 0 && n_values[i] <= n_values[i - 1]) {
      throw std::invalid_argument("word lengths must be strictly increasing");
    }
  }
}

struct SeedOutcomes {
  std::uint64_t seed;
  std::vector<ReturnOutcome> outcomes;
};

AggregateEstimate aggregate_repetitions(std::span<const std::size_t> n_values,
                                        const std::vector<SeedOutcomes>& per_seed,
                                        std::vector<SeedFailure> failures) {
  if (per_seed.empty()) throw Error("no word produced repetition times");
  // Largest n completed by every word. A map error says nothing about the
  // repetition time, so such rows do not block a length; the seed is dropped.
  std::optional<std::size_t> report;
  for (std::size_t j = n_values.size(); j-- > 0;) {
    const bool all = std::all_of(per_seed.begin(), per_seed.end(), [j](const SeedOutcomes& s) {
      return s.outcomes[j].ok() || s.outcomes[j].status == RowFlag::map_error;
    });
    const bool any = std::any_of(per_seed.begin(), per_seed.end(),
                                 [j](const SeedOutcomes& s) { return s.outcomes[j].ok(); });
    if (all && any) {
      report = j;
      break;
    }
  }
  if (!report) throw FitError("no word length completed for every word within the scan limit");

  const double n_star = static_cast<double>(n_values[*report]);
  std::vector<Estimate> estimates;
  for (const auto& s : per_seed) {
    if (!s.outcomes[*report].ok()) {
      failures.push_back({s.seed, fmt::format("map error before R_{} resolved", n_values[*report])});
      continue;
    }
    Estimate e;
    e.method = "entropy-ow";
    e.value = std::log(static_cast<double>(s.outcomes[*report].value)) / n_star;
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t j = 0; j < n_values.size(); ++j) {
      if (s.outcomes[j].ok()) {
        xs.push_back(static_cast<double>(n_values[j]));
        ys.push_back(std::log(static_cast<double>(s.outcomes[j].value)));
      } else {
        e.flags.push_back(fmt::format("{}@n={}", to_string(s.outcomes[j].status), n_values[j]));
      }
    }
    e.fit = xs.size() >= 2 ? fit_loglog(xs, ys) : Fit{e.value, 0.0, 0.0};
    e.scale_min = static_cast<double>(n_values.front());
    e.scale_max = n_star;
    e.n_samples = xs.size();
    estimates.push_back(std::move(e));
  }
  return aggregate_estimates("entropy-ow", std::move(estimates), std::move(failures));
}

}  // namespace

Fit fit_loglog(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw FitError("xs and ys differ in length");
  if (xs.size() < 2) throw FitError("need at least two points");
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw FitError("degenerate abscissae: all xs equal");
  Fit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ss += r * r;
  }
  fit.residual_rms = std::sqrt(ss / n);
  return fit;
}

AggregateEstimate aggregate_estimates(std::string method, std::vector<Estimate> per_seed,
                                      std::vector<SeedFailure> failures) {
  if (per_seed.empty()) {
    if (failures.empty()) throw Error(fmt::format("{}: no seed produced an estimate", method));
    throw Error(fmt::format("{}: no seed produced an estimate ({} failures, first: {})", method,
                            failures.size(), failures.front().reason));
  }
  AggregateEstimate agg;
  agg.method = std::move(method);
  std::vector<double> values;
  values.reserve(per_seed.size());
  for (const auto& e : per_seed) values.push_back(e.value);
  agg.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  // Guard the invariant min <= mean <= max against rounding.
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  agg.mean = std::clamp(agg.mean, *lo, *hi);
  agg.spread = quantile(values, 0.75) - quantile(values, 0.25);
  agg.per_seed = std::move(per_seed);
  agg.failures = std::move(failures);
  return agg;
}

AggregateEstimate lyapunov_birkhoff(const IntervalMap& map, std::span<const std::uint64_t> seeds,
                                    std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("orbit length must be at least 1");
  std::vector<Estimate> estimates;
  std::vector<SeedFailure> failures;
  for (std::uint64_t seed : seeds) {
    try {
      double sum = 0.0;
      if (map.orbit_mode() == OrbitMode::floating) {
        sum = log_derivative_sum(map, sample_initial_point(map, seed), n);
      } else {
        // Symbolic orbits: constant |T'| per branch, read along the stream.
        OrbitCursor cursor = typical_orbit(map, seed);
        double x = cursor.current();
        for (std::uint64_t i = 0; i < n; ++i) {
          sum += std::log(std::abs(map.derivative(map.branch_index(x), x)));
          x = cursor.advance();
        }
      }
      Estimate e;
      e.method = "lyapunov-birkhoff";
      e.value = sum / static_cast<double>(n);
      e.fit = {e.value, 0.0, 0.0};
      e.scale_min = e.scale_max = static_cast<double>(n);
      e.n_samples = n;
      estimates.push_back(std::move(e));
    } catch (const Error& err) {
      failures.push_back({seed, err.what()});
    }
  }
  return aggregate_estimates("lyapunov-birkhoff", std::move(estimates), std::move(failures));
}

Estimate lyapunov_from_ball_returns(const ReturnSeries& series) {
  require_nonzero_entropy(series);
  const Columns c = usable_columns(series, SeriesKind::ball_set_return);
  std::vector<double> xs;
  for (double r : c.radii) xs.push_back(-std::log(r));
  Estimate e;
  e.method = "lyapunov-ball-returns";
  e.fit = fit_loglog(xs, c.values);
  if (!(e.fit.slope > 0.0)) {
    throw FitError(fmt::format("nonpositive slope {} of tau(B_r) against -log r", e.fit.slope));
  }
  e.value = 1.0 / e.fit.slope;
  double envelope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0.0) envelope = std::min(envelope, c.values[i] / xs[i]);
  }
  if (std::isfinite(envelope)) e.lower_envelope = envelope;
  e.scale_min = *std::min_element(c.radii.begin(), c.radii.end());
  e.scale_max = *std::max_element(c.radii.begin(), c.radii.end());
  e.n_samples = xs.size();
  e.flags = flagged_rows(series);
  return e;
}

Estimate dimension_from_point_returns(const ReturnSeries& series) {
  require_nonzero_entropy(series);
  const Columns c = usable_columns(series, SeriesKind::point_return);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < c.radii.size(); ++i) {
    xs.push_back(-std::log(c.radii[i]));
    ys.push_back(std::log(c.values[i]));
  }
  Estimate e;
  e.method = "dimension-point-returns";
  e.fit = fit_loglog(xs, ys);
  if (!(e.fit.slope > 0.0)) {
    throw FitError(fmt::format("nonpositive slope {} of log tau_r against -log r", e.fit.slope));
  }
  e.value = e.fit.slope;
  e.scale_min = *std::min_element(c.radii.begin(), c.radii.end());
  e.scale_max = *std::max_element(c.radii.begin(), c.radii.end());
  e.n_samples = xs.size();
  e.flags = flagged_rows(series);
  return e;
}

AggregateEstimate entropy_ow(std::span<const SymbolSequence> words,
                             std::span<const std::size_t> n_values, std::uint64_t scan_limit) {
  require_increasing(n_values);
  std::vector<SeedOutcomes> per_word;
  for (std::size_t i = 0; i < words.size(); ++i) {
    per_word.push_back({i, repetition_times(words[i].symbols(), n_values, scan_limit)});
  }
  return aggregate_repetitions(n_values, per_word, {});
}

AggregateEstimate entropy_from_repetition_series(std::span<const ReturnSeries> series,
                                                std::vector<SeedFailure> failures) {
  if (series.empty()) throw Error("no repetition series");
  std::vector<std::size_t> n_values;
  for (const auto& row : series.front().rows) n_values.push_back(static_cast<std::size_t>(row.scale));
  require_increasing(n_values);
  std::vector<SeedOutcomes> per_seed;
  for (const auto& s : series) {
    if (s.kind != SeriesKind::repetition) throw std::invalid_argument("expected repetition series");
    if (s.rows.size() != n_values.size()) {
      throw std::invalid_argument("repetition series use different word lengths");
    }
    SeedOutcomes o{s.seed, {}};
    for (std::size_t j = 0; j < n_values.size(); ++j) {
      if (static_cast<std::size_t>(s.rows[j].scale) != n_values[j]) {
        throw std::invalid_argument("repetition series use different word lengths");
      }
      o.outcomes.push_back({s.rows[j].value, s.rows[j].flag});
    }
    per_seed.push_back(std::move(o));
  }
  return aggregate_repetitions(n_values, per_seed, std::move(failures));
}

AggregateEstimate entropy_ow_orbits(const IntervalMap& map, std::span<const std::uint64_t> seeds,
                                    std::span<const std::size_t> n_values,
                                    std::uint64_t scan_limit) {
  require_increasing(n_values);
  std::vector<ReturnSeries> series;
  std::vector<SeedFailure> failures;
  for (std::uint64_t seed : seeds) {
    try {
      auto s = repetition_series(map, typical_orbit(map, seed), n_values, scan_limit);
      s.seed = seed;
      series.push_back(std::move(s));
    } catch (const Error& err) {
      failures.push_back({seed, err.what()});
    }
  }
  return entropy_from_repetition_series(series, std::move(failures));
}

Estimate local_dimension_from_measure(const Orbit& orbit, double x,
                                      std::span<const double> scales) {
  const auto measures = empirical_ball_measures(orbit, x, scales);
  const double length = static_cast<double>(orbit.length());
  Estimate e;
  e.method = "local-dimension-measure";
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> used;
  for (std::size_t j = 0; j < scales.size(); ++j) {
    const double r = scales[j];
    const double m = measures[j];
    if (r >= 1.0 || m >= 1.0) {
      e.flags.push_back(fmt::format("saturated@{:.17g}", r));
    } else if (m * length < static_cast<double>(kMinBallCount)) {
      e.flags.push_back(fmt::format("under-resolved@{:.17g}", r));
    } else {
      xs.push_back(std::log(r));
      ys.push_back(std::log(m));
      used.push_back(r);
    }
  }
  if (xs.size() < 2) throw FitError("fewer than two resolved scales");
  e.fit = fit_loglog(xs, ys);
  e.value = e.fit.slope;
  e.scale_min = *std::min_element(used.begin(), used.end());
  e.scale_max = *std::max_element(used.begin(), used.end());
  e.n_samples = xs.size();
  return e;
}

CrosscheckReport hofbauer_crosscheck(double entropy, double lyapunov, double dimension,
                                     double tolerance) {
  if (!(lyapunov > 0.0)) {
    throw HypothesisError(fmt::format("Lyapunov estimate {} is not positive", lyapunov));
  }
  CrosscheckReport r;
  r.entropy = entropy;
  r.lyapunov = lyapunov;
  r.dimension = dimension;
  r.ratio = entropy / lyapunov;
  r.discrepancy = dimension - r.ratio;
  r.tolerance = tolerance;
  r.within = std::abs(r.discrepancy) < tolerance;
  return r;
}

CrosscheckReport hofbauer_crosscheck(const Estimate& h, const Estimate& lambda, const Estimate& d,
                                     double tolerance) {
  return hofbauer_crosscheck(h.value, lambda.value, d.value, tolerance);
}

}  // namespace recur
