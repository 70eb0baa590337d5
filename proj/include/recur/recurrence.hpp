#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "recur/interval_union.hpp"
#include "recur/maps.hpp"
#include "recur/series.hpp"
#include "recur/symbolic.hpp"

namespace recur {

/// Result of a bounded return-time search. On failure, value carries the
/// budget (or the step reached) and status says why.
struct ReturnOutcome {
  std::uint64_t value = 0;
  RowFlag status = RowFlag::ok;

  bool ok() const { return status == RowFlag::ok; }
};

inline constexpr std::size_t kBallPieceCap = 100'000;
inline constexpr std::uint64_t kUnlimited = std::numeric_limits<std::uint64_t>::max();

/// ceil(10 / r * (1 + |log r|)), scaled.
std::uint64_t default_point_budget(double r, double budget_scale = 1.0);
/// ceil(10 * (-log r) / log(inf |T'|)) for expanding maps; falls back to the
/// point budget when inf |T'| <= 1.
std::uint64_t default_ball_budget(const IntervalMap& map, double r, double budget_scale = 1.0);

/// tau_r(x): least k in [1, budget] with d(T^k x, x) < r (floating orbits).
ReturnOutcome point_return_time(const IntervalMap& map, double x, double r, std::uint64_t budget);

/// Closed ball of radius r about x, intersected with [0, 1]; wraps around
/// for circle-metric maps.
IntervalUnion closed_ball(const IntervalMap& map, double x, double r);

struct BallIterationState {
  IntervalUnion current;
  std::uint64_t step = 0;
  std::size_t piece_count = 0;
  std::uint64_t budget = 0;
};

/// tau(B_r(x)) = least k with T^k B meeting B, computed on exact interval
/// images. Fails with piece_cap_exceeded when T^k B splits into more than
/// piece_cap intervals.
ReturnOutcome ball_set_return(const IntervalMap& map, double x, double r, std::uint64_t budget,
                              std::size_t piece_cap = kBallPieceCap);
/// Same search, also returning the iteration state where it stopped.
ReturnOutcome ball_set_return(const IntervalMap& map, double x, double r, std::uint64_t budget,
                              std::size_t piece_cap, BallIterationState& state);

/// R_n: least k >= 1 with word[k, k+n) == word[0, n), searching starts
/// k <= scan_limit.
ReturnOutcome repetition_time(std::span<const Symbol> word, std::size_t n,
                              std::uint64_t scan_limit = kUnlimited);

/// Online search for the first reoccurrence of several prefixes of one head
/// word. Text symbols are fed starting from index 1 of the sequence whose
/// first symbols are the head. All patterns share the head's border table.
class RepetitionScanner {
 public:
  RepetitionScanner(std::span<const Symbol> head, std::span<const std::size_t> n_values,
                    std::uint64_t scan_limit = kUnlimited);

  /// Consume the symbol at the next text index. Returns true once every
  /// pattern is resolved (found or past the scan limit).
  bool feed(Symbol s);
  bool done() const { return unresolved_ == 0; }
  /// Outcomes in the order of n_values; unresolved patterns report
  /// scan_limit_exceeded.
  std::vector<ReturnOutcome> results() const;

 private:
  std::vector<Symbol> head_;
  std::vector<std::size_t> fail_;
  std::vector<std::size_t> n_values_;
  std::vector<std::size_t> state_;
  std::vector<ReturnOutcome> found_;
  std::vector<bool> resolved_;
  std::size_t unresolved_ = 0;
  std::uint64_t index_ = 0;
  std::uint64_t scan_limit_;
};

std::vector<ReturnOutcome> repetition_times(std::span<const Symbol> word,
                                            std::span<const std::size_t> n_values,
                                            std::uint64_t scan_limit = kUnlimited);

/// Fraction of orbit points within distance r of x (orbit metric).
double empirical_ball_measure(const Orbit& orbit, double x, double r);
/// Measures for many radii in one pass over the orbit.
std::vector<double> empirical_ball_measures(const Orbit& orbit, double x,
                                            std::span<const double> radii);

struct ScanOptions {
  double budget_scale = 1.0;
  std::size_t piece_cap = kBallPieceCap;
  std::uint64_t seed = 0;
};

/// One row per scale for point or ball returns. Scales must be strictly
/// decreasing and positive. Failed rows are flagged, never dropped.
ReturnSeries scan_scales(SeriesKind kind, const IntervalMap& map, double x,
                         std::span<const double> scales, const ScanOptions& options = {});

/// Point returns along an arbitrary orbit cursor (floating or symbolic), in a
/// single pass over the orbit.
ReturnSeries scan_point_returns(const IntervalMap& map, OrbitCursor cursor,
                                std::span<const double> scales, const ScanOptions& options = {});

/// Repetition times R_n of one word for each n.
ReturnSeries repetition_series(const SymbolSequence& word, std::span<const std::size_t> n_values,
                               std::uint64_t scan_limit = kUnlimited);

/// Repetition times of the branch coding of an orbit, generating symbols
/// lazily until every n is resolved or the scan limit is reached.
ReturnSeries repetition_series(const IntervalMap& map, OrbitCursor cursor,
                               std::span<const std::size_t> n_values, std::uint64_t scan_limit);

}  // namespace recur
