#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "recur/complexity.hpp"
#include "recur/estimators.hpp"
#include "recur/series.hpp"
#include "recur/symbolic.hpp"

namespace recur {

inline constexpr const char* kCsvHeader = "kind,seed,x,scale,value,flag";

/// Header plus one line per row, reals with 17 significant digits.
void write_series_csv(std::ostream& out, std::span<const ReturnSeries> series);
void emit_csv(const ReturnSeries& series, const std::filesystem::path& path);
void emit_csv(std::span<const ReturnSeries> series, const std::filesystem::path& path);

/// Inverse of write_series_csv. Consecutive rows sharing (kind, seed, x)
/// form one series. The zero-entropy tag is not stored and reads as false.
std::vector<ReturnSeries> parse_series_csv(std::istream& in);
std::vector<ReturnSeries> read_series_csv(const std::filesystem::path& path);

/// Whitespace-separated nonnegative integers, one word per nonblank line.
/// The alphabet is the largest symbol plus one, taken over all words.
std::vector<SymbolSequence> parse_words(std::istream& in);
std::vector<SymbolSequence> read_words(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering ("%.17g").
std::string format_real(double value);

nlohmann::ordered_json to_json(const Estimate& estimate);
nlohmann::ordered_json to_json(const AggregateEstimate& aggregate);
nlohmann::ordered_json to_json(const ComplexityReport& report);
nlohmann::ordered_json to_json(const RepetitionBoundReport& report);
nlohmann::ordered_json to_json(const CrosscheckReport& report);

/// Writes pretty-printed JSON with a trailing newline.
void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path);

}  // namespace recur
