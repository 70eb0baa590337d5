#include "recur/recurrence.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "recur/error.hpp"

namespace recur {
namespace {

std::uint64_t ceil_budget(double value) {
  if (!(value < 9.0e18)) return kUnlimited;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(value)));
}

void require_decreasing(std::span<const double> scales) {
  for (std::size_t i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0)) throw std::invalid_argument("scales must be positive");
    if (i > 0 && !(scales[i] < scales[i - 1])) {
      throw std::invalid_argument("scales must be strictly decreasing");
    }
  }
}

void require_increasing(std::span<const std::size_t> n_values) {
  for (std::size_t i = 1; i < n_values.size(); ++i) {
    if (!(n_values[i] > n_values[i - 1])) {
      throw std::invalid_argument("repetition lengths must be strictly increasing");
    }
  }
}

}  // namespace

std::uint64_t default_point_budget(double r, double budget_scale) {
  return ceil_budget(budget_scale * 10.0 / r * (1.0 + std::abs(std::log(r))));
}

std::uint64_t default_ball_budget(const IntervalMap& map, double r, double budget_scale) {
  const double slope = map.min_abs_slope();
  if (slope <= 1.0) return default_point_budget(r, budget_scale);
  return ceil_budget(budget_scale * 10.0 * std::max(-std::log(r), 1.0) / std::log(slope));
}

ReturnOutcome point_return_time(const IntervalMap& map, double x, double r, std::uint64_t budget) {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  if (budget == 0) throw std::invalid_argument("budget must be at least 1");
  OrbitCursor cursor(map, x);
  for (std::uint64_t k = 1; k <= budget; ++k) {
    if (map.distance(cursor.advance(), x) < r) return {k, RowFlag::ok};
  }
  return {budget, RowFlag::budget_exceeded};
}

IntervalUnion closed_ball(const IntervalMap& map, double x, double r) {
  if (map.metric() == Metric::circle) {
    if (r >= 0.5) return IntervalUnion{{0.0, 1.0}};
    std::vector<Interval> pieces{{x - r, x + r}};
    if (x - r < 0.0) pieces.push_back({1.0 + (x - r), 1.0});
    if (x + r > 1.0) pieces.push_back({0.0, x + r - 1.0});
    return IntervalUnion(std::move(pieces));
  }
  return IntervalUnion{{x - r, x + r}};
}

ReturnOutcome ball_set_return(const IntervalMap& map, double x, double r, std::uint64_t budget,
                              std::size_t piece_cap, BallIterationState& state) {
  if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
  const IntervalUnion ball = closed_ball(map, x, r);
  if (ball.empty() || ball.total_length() <= 0.0) {
    throw std::invalid_argument("ball is degenerate in [0, 1]");
  }
  state = {ball, 0, ball.size(), budget};
  while (state.step < budget) {
    state.current = image_of_union(map, state.current);
    ++state.step;
    state.piece_count = state.current.size();
    if (state.piece_count > piece_cap) return {state.step, RowFlag::piece_cap_exceeded};
    if (state.current.intersects(ball)) return {state.step, RowFlag::ok};
  }
  return {budget, RowFlag::budget_exceeded};
}

ReturnOutcome ball_set_return(const IntervalMap& map, double x, double r, std::uint64_t budget,
                              std::size_t piece_cap) {
  BallIterationState state;
  return ball_set_return(map, x, r, budget, piece_cap, state);
}

RepetitionScanner::RepetitionScanner(std::span<const Symbol> head,
                                     std::span<const std::size_t> n_values,
                                     std::uint64_t scan_limit)
    : n_values_(n_values.begin(), n_values.end()), scan_limit_(scan_limit) {
  std::size_t longest = 0;
  for (std::size_t n : n_values_) {
    if (n == 0) throw std::invalid_argument("repetition length must be positive");
    longest = std::max(longest, n);
  }
  if (longest > head.size()) {
    throw std::invalid_argument(
        fmt::format("word of length {} is shorter than n = {}", head.size(), longest));
  }
  head_.assign(head.begin(), head.begin() + static_cast<std::ptrdiff_t>(longest));
  fail_ = border_table(head_);
  state_.assign(n_values_.size(), 0);
  found_.assign(n_values_.size(), {});
  resolved_.assign(n_values_.size(), false);
  unresolved_ = n_values_.size();
  if (scan_limit_ == 0) {
    for (std::size_t j = 0; j < n_values_.size(); ++j) {
      resolved_[j] = true;
      found_[j] = {1, RowFlag::scan_limit_exceeded};
    }
    unresolved_ = 0;
  }
}

bool RepetitionScanner::feed(Symbol s) {
  ++index_;
  for (std::size_t j = 0; j < n_values_.size(); ++j) {
    if (resolved_[j]) continue;
    const std::size_t n = n_values_[j];
    std::size_t q = state_[j];
    while (q > 0 && head_[q] != s) q = fail_[q - 1];
    if (head_[q] == s) ++q;
    state_[j] = q;
    if (q == n) {
      found_[j] = {index_ + 1 - n, RowFlag::ok};
      resolved_[j] = true;
      --unresolved_;
      continue;
    }
    // The next candidate start would be index_ + 2 - n.
    if (index_ + 2 > n && index_ + 2 - n > scan_limit_) {
      found_[j] = {scan_limit_, RowFlag::scan_limit_exceeded};
      resolved_[j] = true;
      --unresolved_;
    }
  }
  return done();
}

std::vector<ReturnOutcome> RepetitionScanner::results() const {
  std::vector<ReturnOutcome> out = found_;
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (!resolved_[j]) {
      const std::size_t n = n_values_[j];
      const std::uint64_t examined = index_ + 1 >= n ? index_ + 1 - n : 0;
      out[j] = {std::max<std::uint64_t>(1, examined), RowFlag::scan_limit_exceeded};
    }
  }
  return out;
}

std::vector<ReturnOutcome> repetition_times(std::span<const Symbol> word,
                                            std::span<const std::size_t> n_values,
                                            std::uint64_t scan_limit) {
  RepetitionScanner scanner(word, n_values, scan_limit);
  for (std::size_t i = 1; i < word.size() && !scanner.done(); ++i) scanner.feed(word[i]);
  return scanner.results();
}

ReturnOutcome repetition_time(std::span<const Symbol> word, std::size_t n,
                              std::uint64_t scan_limit) {
  const std::size_t ns[] = {n};
  return repetition_times(word, ns, scan_limit).front();
}

double empirical_ball_measure(const Orbit& orbit, double x, double r) {
  const double radii[] = {r};
  return empirical_ball_measures(orbit, x, radii).front();
}

std::vector<double> empirical_ball_measures(const Orbit& orbit, double x,
                                            std::span<const double> radii) {
  if (orbit.length() == 0) throw std::invalid_argument("empty orbit");
  // Sort radii descending; count[j] = points with distance < sorted[j].
  std::vector<std::size_t> order(radii.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return radii[a] > radii[b]; });
  std::vector<double> sorted(radii.size());
  for (std::size_t j = 0; j < order.size(); ++j) sorted[j] = radii[order[j]];

  // hits[m] = points inside exactly the m largest balls.
  std::vector<std::size_t> hits(radii.size() + 1, 0);
  for (double p : orbit.points) {
    double d = std::abs(p - x);
    if (orbit.metric == Metric::circle) d = std::min(d, 1.0 - d);
    // number of radii strictly greater than d
    const auto inside = static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), d, std::greater<double>()) -
        sorted.begin());
    ++hits[inside];
  }
  std::vector<double> out(radii.size());
  std::size_t cumulative = 0;
  for (std::size_t m = radii.size(); m >= 1; --m) {
    cumulative += hits[m];
    const std::size_t j = order[m - 1];
    out[j] = radii[j] >= 1.0 ? 1.0
                             : static_cast<double>(cumulative) / static_cast<double>(orbit.length());
  }
  return out;
}

ReturnSeries scan_point_returns(const IntervalMap& map, OrbitCursor cursor,
                                std::span<const double> scales, const ScanOptions& options) {
  require_decreasing(scales);
  ReturnSeries series;
  series.kind = SeriesKind::point_return;
  series.seed = options.seed;
  series.x = cursor.current();
  series.zero_entropy = map.zero_entropy();
  const std::size_t m = scales.size();
  series.rows.resize(m);
  std::vector<std::uint64_t> budgets(m);
  std::uint64_t longest = 0;
  for (std::size_t j = 0; j < m; ++j) {
    series.rows[j].scale = scales[j];
    budgets[j] = default_point_budget(scales[j], options.budget_scale);
    longest = std::max(longest, budgets[j]);
  }

  // Scales decrease, so return times are nondecreasing along the rows and
  // every unresolved row from `next` on is still waiting.
  const double x = cursor.current();
  std::size_t next = 0;
  std::uint64_t k = 0;
  try {
    for (k = 1; k <= longest && next < m; ++k) {
      while (next < m && k > budgets[next]) {
        series.rows[next] = {scales[next], budgets[next], RowFlag::budget_exceeded};
        ++next;
      }
      const double d = map.distance(cursor.advance(), x);
      while (next < m && d < scales[next]) {
        series.rows[next] = {scales[next], k, RowFlag::ok};
        ++next;
      }
    }
    for (; next < m; ++next) {
      series.rows[next] = {scales[next], budgets[next], RowFlag::budget_exceeded};
    }
  } catch (const Error&) {
    const std::uint64_t reached = std::max<std::uint64_t>(1, k - 1);
    for (; next < m; ++next) series.rows[next] = {scales[next], reached, RowFlag::map_error};
  }
  return series;
}

ReturnSeries scan_scales(SeriesKind kind, const IntervalMap& map, double x,
                         std::span<const double> scales, const ScanOptions& options) {
  if (kind == SeriesKind::point_return) {
    return scan_point_returns(map, OrbitCursor(map, x), scales, options);
  }
  if (kind != SeriesKind::ball_set_return) {
    throw std::invalid_argument("scan_scales handles point-return and ball-set-return series");
  }
  require_decreasing(scales);
  ReturnSeries series;
  series.kind = kind;
  series.seed = options.seed;
  series.x = x;
  series.zero_entropy = map.zero_entropy();
  for (double r : scales) {
    const std::uint64_t budget = default_ball_budget(map, r, options.budget_scale);
    BallIterationState state;
    try {
      const auto outcome = ball_set_return(map, x, r, budget, options.piece_cap, state);
      series.rows.push_back({r, outcome.value, outcome.status});
    } catch (const Error&) {
      series.rows.push_back({r, std::max<std::uint64_t>(1, state.step), RowFlag::map_error});
    }
  }
  return series;
}

ReturnSeries repetition_series(const SymbolSequence& word, std::span<const std::size_t> n_values,
                               std::uint64_t scan_limit) {
  require_increasing(n_values);
  ReturnSeries series;
  series.kind = SeriesKind::repetition;
  const auto outcomes = repetition_times(word.symbols(), n_values, scan_limit);
  for (std::size_t j = 0; j < n_values.size(); ++j) {
    series.rows.push_back({static_cast<double>(n_values[j]), outcomes[j].value, outcomes[j].status});
  }
  return series;
}

ReturnSeries repetition_series(const IntervalMap& map, OrbitCursor cursor,
                               std::span<const std::size_t> n_values, std::uint64_t scan_limit) {
  require_increasing(n_values);
  if (n_values.empty()) throw std::invalid_argument("need at least one word length");
  ReturnSeries series;
  series.kind = SeriesKind::repetition;
  series.x = cursor.current();
  series.zero_entropy = map.zero_entropy();
  const std::size_t longest = n_values.back();
  std::vector<ReturnOutcome> outcomes;
  std::vector<Symbol> head;
  head.reserve(longest);
  try {
    head.push_back(static_cast<Symbol>(map.branch_index(cursor.current())));
    while (head.size() < longest) head.push_back(static_cast<Symbol>(map.branch_index(cursor.advance())));
  } catch (const Error&) {
    for (std::size_t n : n_values) series.rows.push_back({static_cast<double>(n), 1, RowFlag::map_error});
    return series;
  }
  RepetitionScanner scanner(head, n_values, scan_limit);
  bool failed = false;
  try {
    for (std::size_t i = 1; i < head.size() && !scanner.done(); ++i) scanner.feed(head[i]);
    while (!scanner.done()) scanner.feed(static_cast<Symbol>(map.branch_index(cursor.advance())));
  } catch (const Error&) {
    failed = true;
  }
  outcomes = scanner.results();
  for (std::size_t j = 0; j < n_values.size(); ++j) {
    RowFlag flag = outcomes[j].status;
    if (failed && flag == RowFlag::scan_limit_exceeded) flag = RowFlag::map_error;
    series.rows.push_back({static_cast<double>(n_values[j]), outcomes[j].value, flag});
  }
  return series;
}

}  // namespace recur
