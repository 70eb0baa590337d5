#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recur/interval_union.hpp"
#include "recur/rng.hpp"

namespace recur {

enum class MapFamily { tripling, doubling, tent, logistic, gauss, rotation, manneville_pomeau };

enum class Monotone { increasing, decreasing };

/// Rotations live on the circle; every other map uses |x - y| on [0, 1].
enum class Metric { flat, circle };

/// floating: orbits are produced by iterating the map in double precision.
/// symbolic_exact: orbits are produced from an i.i.d. fair bit stream (the
/// exact symbolic model of a Lebesgue-typical point) and points are 53-bit
/// windows of that stream.
enum class OrbitMode { floating, symbolic_exact };

/// One monotone piece of an interval map. Evaluators accept the closure of
/// the domain so that interval endpoints can be pushed forward.
struct Branch {
  std::size_t index = 0;
  Interval domain;
  Monotone direction = Monotone::increasing;
  std::function<double(double)> forward;
  std::function<double(double)> derivative;
};

/// Piecewise-monotonic self-map of [0, 1]. Immutable after construction and
/// safe to share across threads.
///
/// Branch k covers the open interval between consecutive boundaries. A point
/// lying exactly on a shared boundary belongs to the branch on its right;
/// the point 1 belongs to the rightmost branch.
class IntervalMap {
 public:
  MapFamily family() const { return family_; }
  const std::string& name() const { return name_; }
  std::span<const double> params() const { return params_; }

  std::size_t branch_count() const;
  /// Index of the branch containing x. Throws BranchTruncationError for Gauss
  /// points below the last materialized branch.
  std::size_t branch_index(double x) const;
  Interval branch_domain(std::size_t k) const;
  Monotone branch_direction(std::size_t k) const;
  Branch branch(std::size_t k) const;

  /// Branch evaluator on the closed domain, clamped into [0, 1].
  double eval(std::size_t k, double x) const;
  double derivative(std::size_t k, double x) const;
  double operator()(double x) const { return eval(branch_index(x), x); }

  /// Interior branch boundaries (finite families only).
  const std::vector<double>& cuts() const;

  bool markov() const { return markov_; }
  bool zero_entropy() const { return family_ == MapFamily::rotation; }
  OrbitMode orbit_mode() const;
  Metric metric() const { return family_ == MapFamily::rotation ? Metric::circle : Metric::flat; }
  double distance(double a, double b) const;

  /// Empty when no sampler for the invariant measure is registered.
  const std::string& invariant_measure_id() const { return measure_id_; }
  /// inf |T'| over the interval; 0 for maps with a critical point.
  double min_abs_slope() const;

 private:
  friend IntervalMap make_builtin_map(std::string_view, std::span<const double>);

  MapFamily family_ = MapFamily::tripling;
  std::string name_;
  std::vector<double> params_;
  std::vector<double> cuts_;
  std::uint64_t gauss_branches_ = 0;
  bool markov_ = false;
  std::string measure_id_;
};

/// Default number of materialized Gauss-map branches.
inline constexpr std::uint64_t kGaussDefaultBranches = 1'000'000;

/// Builds one of the built-in families:
///   tripling, doubling, tent                  no parameters
///   logistic            [a]        a in (0, 4]
///   gauss               [branches] optional truncation, default 10^6
///   rotation            [alpha]    alpha in (0, 1)
///   manneville-pomeau   [s]        s > 0
IntervalMap make_builtin_map(std::string_view name, std::span<const double> params = {});

std::vector<std::string> builtin_map_names();

/// T^n x in floating arithmetic.
double iterate(const IntervalMap& map, double x, std::uint64_t n);

/// Draws a point distributed by the map's invariant measure, reproducibly
/// from rng_seed. Lebesgue for tripling/doubling/tent/rotation, arcsine for
/// logistic(4), Gauss measure for gauss. Manneville-Pomeau uses a Lebesgue
/// draw followed by a 1000-step burn-in (approximate).
double sample_initial_point(const IntervalMap& map, std::uint64_t rng_seed);

/// Closure of T(u): every interval is split at branch boundaries and each
/// piece is mapped endpoint-to-endpoint by its branch. Degenerate pieces that
/// arise only from touching a boundary are dropped.
IntervalUnion image_of_union(const IntervalMap& map, const IntervalUnion& u);

/// Sum of log|T'(T^i x)| for i < n. Throws CriticalPointError on a zero or
/// non-finite derivative.
double log_derivative_sum(const IntervalMap& map, double x, std::uint64_t n);

/// Stateful orbit generator. Floating mode iterates the map; symbolic mode
/// (doubling, tent) consumes fair random bits and exposes 53-bit windows.
class OrbitCursor {
 public:
  OrbitCursor(const IntervalMap& map, double x0);
  static OrbitCursor symbolic(const IntervalMap& map, std::uint64_t rng_seed);

  double current() const { return current_; }
  double advance();
  OrbitMode mode() const { return mode_; }

 private:
  OrbitCursor(const IntervalMap& map, std::uint64_t rng_seed);
  bool next_bit();
  double window_value() const;

  const IntervalMap* map_;
  OrbitMode mode_;
  double current_ = 0.0;
  // symbolic state
  Rng rng_{0};
  std::uint64_t window_ = 0;
  bool complement_ = false;
  std::uint64_t bit_pool_ = 0;
  int bits_left_ = 0;
};

/// Cursor for a seeded, measure-typical orbit in the map's natural mode.
OrbitCursor typical_orbit(const IntervalMap& map, std::uint64_t rng_seed);

struct Orbit {
  std::vector<double> points;
  double seed = 0.0;
  OrbitMode mode = OrbitMode::floating;
  Metric metric = Metric::flat;

  std::size_t length() const { return points.size(); }
};

/// Floating-mode orbit x0, T x0, ... of the given length. Throws
/// OrbitModeError for symbolic-only maps.
Orbit generate_orbit(const IntervalMap& map, double x0, std::size_t length);

/// Symbolic-exact orbit for doubling or tent. points[0] equals
/// sample_initial_point(map, rng_seed).
Orbit generate_symbolic_orbit(const IntervalMap& map, std::uint64_t rng_seed, std::size_t length);

/// Orbit in the map's natural mode started from sample_initial_point.
Orbit generate_typical_orbit(const IntervalMap& map, std::uint64_t rng_seed, std::size_t length);

}  // namespace recur
