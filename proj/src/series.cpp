#include "recur/series.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace recur {
namespace {

constexpr std::array<std::pair<SeriesKind, std::string_view>, 4> kKindNames{{
    {SeriesKind::point_return, "point-return"},
    {SeriesKind::ball_set_return, "ball-set-return"},
    {SeriesKind::cylinder_return, "cylinder-return"},
    {SeriesKind::repetition, "repetition"},
}};

constexpr std::array<std::pair<RowFlag, std::string_view>, 7> kFlagNames{{
    {RowFlag::ok, "ok"},
    {RowFlag::budget_exceeded, "budget-exceeded"},
    {RowFlag::piece_cap_exceeded, "piece-cap-exceeded"},
    {RowFlag::scan_limit_exceeded, "scan-limit-exceeded"},
    {RowFlag::under_resolved, "under-resolved"},
    {RowFlag::saturated, "saturated"},
    {RowFlag::map_error, "map-error"},
}};

template <typename Table, typename Key>
std::string_view name_of(const Table& table, Key key) {
  for (const auto& [k, name] : table) {
    if (k == key) return name;
  }
  return "unknown";
}

template <typename Table>
auto parse_name(const Table& table, std::string_view text)
    -> std::optional<typename Table::value_type::first_type> {
  for (const auto& [k, name] : table) {
    if (name == text) return k;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(SeriesKind kind) { return name_of(kKindNames, kind); }
std::string_view to_string(RowFlag flag) { return name_of(kFlagNames, flag); }
std::optional<SeriesKind> parse_series_kind(std::string_view text) {
  return parse_name(kKindNames, text);
}
std::optional<RowFlag> parse_row_flag(std::string_view text) { return parse_name(kFlagNames, text); }

std::size_t ReturnSeries::usable_rows() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const ReturnRow& r) { return r.usable(); }));
}

}  // namespace recur
