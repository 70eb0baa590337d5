#include "recur/maps.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "recur/error.hpp"

namespace recur {
namespace {

constexpr std::uint64_t kMask53 = (std::uint64_t{1} << 53) - 1;

void expect_param_count(std::string_view name, std::span<const double> params, std::size_t lo,
                        std::size_t hi) {
  if (params.size() < lo || params.size() > hi) {
    throw ParameterError(fmt::format("map '{}' takes {}{} parameter(s), got {}", name, lo,
                                     lo == hi ? "" : fmt::format("-{}", hi), params.size()));
  }
}

// Root of c + c^(1+s) = 1 on (0, 1).
double pomeau_cut(double s) {
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid + std::pow(mid, 1.0 + s) < 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

// Compensated (Neumaier) accumulator.
struct Accumulator {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

std::vector<std::string> builtin_map_names() {
  return {"tripling", "doubling", "tent", "logistic", "gauss", "rotation", "manneville-pomeau"};
}

IntervalMap make_builtin_map(std::string_view name, std::span<const double> params) {
  IntervalMap m;
  m.name_ = std::string(name);
  m.params_.assign(params.begin(), params.end());

  if (name == "tripling") {
    expect_param_count(name, params, 0, 0);
    m.family_ = MapFamily::tripling;
    m.cuts_ = {1.0 / 3.0, 2.0 / 3.0};
    m.markov_ = true;
    m.measure_id_ = "lebesgue";
  } else if (name == "doubling" || name == "tent") {
    expect_param_count(name, params, 0, 0);
    m.family_ = name == "doubling" ? MapFamily::doubling : MapFamily::tent;
    m.cuts_ = {0.5};
    m.markov_ = true;
    m.measure_id_ = "lebesgue";
  } else if (name == "logistic") {
    expect_param_count(name, params, 1, 1);
    const double a = params[0];
    if (!(a > 0.0 && a <= 4.0)) {
      throw ParameterError(fmt::format("logistic parameter a={} outside (0, 4]", a));
    }
    m.family_ = MapFamily::logistic;
    m.cuts_ = {0.5};
    m.markov_ = a == 4.0;
    if (a == 4.0) m.measure_id_ = "arcsine";
  } else if (name == "gauss") {
    expect_param_count(name, params, 0, 1);
    m.family_ = MapFamily::gauss;
    m.gauss_branches_ = kGaussDefaultBranches;
    if (!params.empty()) {
      const double b = params[0];
      if (!(b >= 2.0 && b <= 4294967295.0) || b != std::floor(b)) {
        throw ParameterError(
            fmt::format("gauss branch count {} must be an integer in [2, 2^32-1]", b));
      }
      m.gauss_branches_ = static_cast<std::uint64_t>(b);
    }
    m.measure_id_ = "gauss";
  } else if (name == "rotation") {
    expect_param_count(name, params, 1, 1);
    const double alpha = params[0];
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw ParameterError(fmt::format("rotation angle {} outside (0, 1)", alpha));
    }
    m.family_ = MapFamily::rotation;
    m.cuts_ = {1.0 - alpha};
    m.measure_id_ = "lebesgue";
  } else if (name == "manneville-pomeau") {
    expect_param_count(name, params, 1, 1);
    const double s = params[0];
    if (!(s > 0.0 && std::isfinite(s))) {
      throw ParameterError(fmt::format("manneville-pomeau exponent {} must be positive", s));
    }
    m.family_ = MapFamily::manneville_pomeau;
    m.cuts_ = {pomeau_cut(s)};
    m.measure_id_ = "lebesgue-burn-in";
  } else {
    throw UnknownMapError(fmt::format("unknown map '{}'", name));
  }
  return m;
}

std::size_t IntervalMap::branch_count() const {
  return family_ == MapFamily::gauss ? static_cast<std::size_t>(gauss_branches_)
                                     : cuts_.size() + 1;
}

std::size_t IntervalMap::branch_index(double x) const {
  if (family_ != MapFamily::gauss) {
    return static_cast<std::size_t>(std::upper_bound(cuts_.begin(), cuts_.end(), x) -
                                    cuts_.begin());
  }
  const double limit = static_cast<double>(gauss_branches_);
  if (!(x >= 1.0 / limit)) {
    throw BranchTruncationError(
        fmt::format("gauss orbit point {} below materialized range (1/{})", x, gauss_branches_));
  }
  const double q = 1.0 / x;
  double digit = std::floor(q);
  if (q == digit && digit > 1.0) digit -= 1.0;  // boundary 1/k goes to the right branch
  if (digit > limit) {
    throw BranchTruncationError(fmt::format("gauss digit {} exceeds {}", digit, gauss_branches_));
  }
  return static_cast<std::size_t>(digit) - 1;
}

Interval IntervalMap::branch_domain(std::size_t k) const {
  if (family_ == MapFamily::gauss) {
    const double d = static_cast<double>(k) + 1.0;
    return {1.0 / (d + 1.0), 1.0 / d};
  }
  return {k == 0 ? 0.0 : cuts_[k - 1], k == cuts_.size() ? 1.0 : cuts_[k]};
}

Monotone IntervalMap::branch_direction(std::size_t k) const {
  switch (family_) {
    case MapFamily::gauss:
      return Monotone::decreasing;
    case MapFamily::tent:
    case MapFamily::logistic:
      return k == 0 ? Monotone::increasing : Monotone::decreasing;
    default:
      return Monotone::increasing;
  }
}

Branch IntervalMap::branch(std::size_t k) const {
  if (k >= branch_count()) {
    throw std::out_of_range(fmt::format("branch {} of {}", k, branch_count()));
  }
  Branch b;
  b.index = k;
  b.domain = branch_domain(k);
  b.direction = branch_direction(k);
  b.forward = [self = *this, k](double x) { return self.eval(k, x); };
  b.derivative = [self = *this, k](double x) { return self.derivative(k, x); };
  return b;
}

double IntervalMap::eval(std::size_t k, double x) const {
  const double kd = static_cast<double>(k);
  double y = 0.0;
  switch (family_) {
    case MapFamily::tripling:
      y = 3.0 * x - kd;
      break;
    case MapFamily::doubling:
      y = 2.0 * x - kd;
      break;
    case MapFamily::tent:
      y = k == 0 ? 2.0 * x : 2.0 - 2.0 * x;
      break;
    case MapFamily::logistic:
      y = params_[0] * x * (1.0 - x);
      break;
    case MapFamily::gauss:
      y = 1.0 / x - (kd + 1.0);
      break;
    case MapFamily::rotation:
      y = k == 0 ? x + params_[0] : x + params_[0] - 1.0;
      break;
    case MapFamily::manneville_pomeau:
      y = x + std::pow(x, 1.0 + params_[0]) - kd;
      break;
  }
  return std::clamp(y, 0.0, 1.0);
}

double IntervalMap::derivative(std::size_t k, double x) const {
  switch (family_) {
    case MapFamily::tripling:
      return 3.0;
    case MapFamily::doubling:
      return 2.0;
    case MapFamily::tent:
      return k == 0 ? 2.0 : -2.0;
    case MapFamily::logistic:
      return params_[0] * (1.0 - 2.0 * x);
    case MapFamily::gauss:
      return -1.0 / (x * x);
    case MapFamily::rotation:
      return 1.0;
    case MapFamily::manneville_pomeau:
      return 1.0 + (1.0 + params_[0]) * std::pow(x, params_[0]);
  }
  return 0.0;
}

const std::vector<double>& IntervalMap::cuts() const {
  if (family_ == MapFamily::gauss) {
    throw Error("gauss map has a countable monotonicity partition; use branch coding");
  }
  return cuts_;
}

OrbitMode IntervalMap::orbit_mode() const {
  return family_ == MapFamily::doubling || family_ == MapFamily::tent ? OrbitMode::symbolic_exact
                                                                       : OrbitMode::floating;
}

double IntervalMap::distance(double a, double b) const {
  const double d = std::abs(a - b);
  return metric() == Metric::circle ? std::min(d, 1.0 - d) : d;
}

double IntervalMap::min_abs_slope() const {
  switch (family_) {
    case MapFamily::tripling:
      return 3.0;
    case MapFamily::doubling:
    case MapFamily::tent:
      return 2.0;
    case MapFamily::logistic:
      return 0.0;
    case MapFamily::gauss:
    case MapFamily::rotation:
    case MapFamily::manneville_pomeau:
      return 1.0;
  }
  return 0.0;
}

double iterate(const IntervalMap& map, double x, std::uint64_t n) {
  for (std::uint64_t i = 0; i < n; ++i) x = map(x);
  return x;
}

double sample_initial_point(const IntervalMap& map, std::uint64_t rng_seed) {
  const auto& id = map.invariant_measure_id();
  if (id.empty()) {
    throw NoSamplerError(fmt::format("no invariant-measure sampler registered for '{}'", map.name()));
  }
  Rng rng(rng_seed);
  const double u = rng.uniform();
  if (id == "lebesgue") return u;
  if (id == "arcsine") {
    const double s = std::sin(std::numbers::pi * u / 2.0);
    return s * s;
  }
  if (id == "gauss") return std::exp2(u) - 1.0;
  if (id == "lebesgue-burn-in") return iterate(map, u, 1000);
  throw NoSamplerError(fmt::format("unknown sampler '{}'", id));
}

IntervalUnion image_of_union(const IntervalMap& map, const IntervalUnion& u) {
  std::vector<Interval> out;
  const bool gauss = map.family() == MapFamily::gauss;
  for (const Interval& iv : u.intervals()) {
    if (iv.lo == iv.hi) {
      const double y = map(iv.lo);
      out.push_back({y, y});
      continue;
    }
    // Gauss branch indices decrease with x, so walk from the right end.
    std::size_t k = map.branch_index(gauss ? iv.hi : iv.lo);
    while (true) {
      const Interval dom = map.branch_domain(k);
      const double lo = std::max(iv.lo, dom.lo);
      const double hi = std::min(iv.hi, dom.hi);
      if (lo < hi) {
        double y1 = map.eval(k, lo);
        double y2 = map.eval(k, hi);
        if (y1 > y2) std::swap(y1, y2);
        if (y1 <= 0.0 && y2 >= 1.0) return IntervalUnion{{0.0, 1.0}};
        out.push_back({y1, y2});
      }
      if (gauss) {
        if (dom.lo <= iv.lo) break;
        if (++k >= map.branch_count()) {
          throw BranchTruncationError("interval reaches below the materialized gauss branches");
        }
      } else {
        if (dom.hi >= iv.hi || ++k >= map.branch_count()) break;
      }
    }
  }
  return IntervalUnion(std::move(out));
}

double log_derivative_sum(const IntervalMap& map, double x, std::uint64_t n) {
  Accumulator acc;
  for (std::uint64_t i = 0; i < n; ++i) {
    const std::size_t k = map.branch_index(x);
    const double d = map.derivative(k, x);
    if (d == 0.0 || !std::isfinite(d)) {
      throw CriticalPointError(
          fmt::format("derivative {} at orbit point {} (step {})", d, x, i));
    }
    acc.add(std::log(std::abs(d)));
    x = map.eval(k, x);
  }
  return acc.value();
}

OrbitCursor::OrbitCursor(const IntervalMap& map, double x0)
    : map_(&map), mode_(OrbitMode::floating), current_(x0) {
  if (map.orbit_mode() != OrbitMode::floating) {
    throw OrbitModeError(fmt::format(
        "'{}' collapses in binary floating point; use a symbolic-exact orbit", map.name()));
  }
}

OrbitCursor::OrbitCursor(const IntervalMap& map, std::uint64_t rng_seed)
    : map_(&map), mode_(OrbitMode::symbolic_exact), rng_(rng_seed) {
  window_ = rng_.bits() >> 11;
  current_ = window_value();
}

OrbitCursor OrbitCursor::symbolic(const IntervalMap& map, std::uint64_t rng_seed) {
  if (map.orbit_mode() != OrbitMode::symbolic_exact) {
    throw OrbitModeError(fmt::format("'{}' has no symbolic-exact model", map.name()));
  }
  return OrbitCursor(map, rng_seed);
}

bool OrbitCursor::next_bit() {
  if (bits_left_ == 0) {
    bit_pool_ = rng_.bits();
    bits_left_ = 64;
  }
  const bool bit = (bit_pool_ >> 63) != 0;
  bit_pool_ <<= 1;
  --bits_left_;
  return bit;
}

double OrbitCursor::window_value() const {
  const std::uint64_t w = complement_ ? (~window_ & kMask53) : window_;
  return static_cast<double>(w) * 0x1.0p-53;
}

double OrbitCursor::advance() {
  if (mode_ == OrbitMode::floating) {
    current_ = (*map_)(current_);
    return current_;
  }
  const bool fresh = next_bit();
  if (map_->family() == MapFamily::doubling) {
    window_ = ((window_ << 1) | (fresh ? 1 : 0)) & kMask53;
  } else {
    // Tent: the window holds running parities of the itinerary; binary
    // digit j of the current point is parity(k+j) xor parity(k-1).
    const bool leaving = ((window_ >> 52) & 1) != 0;
    const bool parity = ((window_ & 1) != 0) != fresh;
    window_ = ((window_ << 1) | (parity ? 1 : 0)) & kMask53;
    complement_ = leaving;
  }
  current_ = window_value();
  return current_;
}

OrbitCursor typical_orbit(const IntervalMap& map, std::uint64_t rng_seed) {
  if (map.orbit_mode() == OrbitMode::symbolic_exact) return OrbitCursor::symbolic(map, rng_seed);
  return OrbitCursor(map, sample_initial_point(map, rng_seed));
}

namespace {

Orbit collect(OrbitCursor cursor, const IntervalMap& map, std::size_t length) {
  Orbit orbit;
  orbit.seed = cursor.current();
  orbit.mode = cursor.mode();
  orbit.metric = map.metric();
  orbit.points.reserve(length);
  if (length == 0) return orbit;
  orbit.points.push_back(cursor.current());
  while (orbit.points.size() < length) orbit.points.push_back(cursor.advance());
  return orbit;
}

}  // namespace

Orbit generate_orbit(const IntervalMap& map, double x0, std::size_t length) {
  return collect(OrbitCursor(map, x0), map, length);
}

Orbit generate_symbolic_orbit(const IntervalMap& map, std::uint64_t rng_seed, std::size_t length) {
  return collect(OrbitCursor::symbolic(map, rng_seed), map, length);
}

Orbit generate_typical_orbit(const IntervalMap& map, std::uint64_t rng_seed, std::size_t length) {
  return collect(typical_orbit(map, rng_seed), map, length);
}

}  // namespace recur
