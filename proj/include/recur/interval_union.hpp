#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace recur {

/// Closed subinterval [lo, hi] of [0, 1].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  /// Closed-interval test with exact endpoint comparison.
  bool intersects(const Interval& other) const { return lo <= other.hi && other.lo <= hi; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite disjoint union of closed subintervals of [0, 1], kept sorted by
/// left endpoint. Touching or overlapping inputs are merged on construction.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  explicit IntervalUnion(std::vector<Interval> pieces);
  IntervalUnion(std::initializer_list<Interval> pieces)
      : IntervalUnion(std::vector<Interval>(pieces)) {}

  std::span<const Interval> intervals() const { return pieces_; }
  std::size_t size() const { return pieces_.size(); }
  bool empty() const { return pieces_.empty(); }
  double total_length() const;

  bool contains(double x) const;
  bool intersects(const IntervalUnion& other) const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<Interval> pieces_;
};

}  // namespace recur
