#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace recur {

enum class SeriesKind { point_return, ball_set_return, cylinder_return, repetition };

/// Per-row status. Flagged rows stay in the series and are excluded from fits.
enum class RowFlag {
  ok,
  budget_exceeded,
  piece_cap_exceeded,
  scan_limit_exceeded,
  under_resolved,
  saturated,
  map_error,
};

std::string_view to_string(SeriesKind kind);
std::string_view to_string(RowFlag flag);
std::optional<SeriesKind> parse_series_kind(std::string_view text);
std::optional<RowFlag> parse_row_flag(std::string_view text);

/// scale is a radius for point/ball rows and a word length for
/// cylinder/repetition rows. For flagged rows, value holds the budget or the
/// step reached when the computation stopped.
struct ReturnRow {
  double scale = 0.0;
  std::uint64_t value = 0;
  RowFlag flag = RowFlag::ok;

  bool usable() const { return flag == RowFlag::ok; }
  friend bool operator==(const ReturnRow&, const ReturnRow&) = default;
};

struct ReturnSeries {
  SeriesKind kind = SeriesKind::point_return;
  std::uint64_t seed = 0;
  double x = 0.0;
  /// Set from the map; estimators refuse zero-entropy series.
  bool zero_entropy = false;
  std::vector<ReturnRow> rows;

  std::size_t usable_rows() const;
};

}  // namespace recur
