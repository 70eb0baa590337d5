#include "recur/interval_union.hpp"

#include <algorithm>

namespace recur {

IntervalUnion::IntervalUnion(std::vector<Interval> pieces) {
  std::erase_if(pieces, [](const Interval& iv) { return !(iv.lo <= iv.hi) || iv.hi < 0.0 || iv.lo > 1.0; });
  for (auto& iv : pieces) {
    iv.lo = std::clamp(iv.lo, 0.0, 1.0);
    iv.hi = std::clamp(iv.hi, 0.0, 1.0);
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (const auto& iv : pieces) {
    if (!pieces_.empty() && iv.lo <= pieces_.back().hi) {
      pieces_.back().hi = std::max(pieces_.back().hi, iv.hi);
    } else {
      pieces_.push_back(iv);
    }
  }
}

double IntervalUnion::total_length() const {
  double total = 0.0;
  for (const auto& iv : pieces_) total += iv.length();
  return total;
}

bool IntervalUnion::contains(double x) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), x,
                             [](double v, const Interval& iv) { return v < iv.lo; });
  return it != pieces_.begin() && std::prev(it)->contains(x);
}

bool IntervalUnion::intersects(const IntervalUnion& other) const {
  auto a = pieces_.begin();
  auto b = other.pieces_.begin();
  while (a != pieces_.end() && b != other.pieces_.end()) {
    if (a->intersects(*b)) return true;
    if (a->hi < b->hi) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

}  // namespace recur
