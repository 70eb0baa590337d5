#include "recur/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "recur/error.hpp"

namespace recur {
namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_real(const std::string& text, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error(fmt::format("line {}: bad number '{}'", line_no, text));
  }
  return v;
}

std::uint64_t parse_count(const std::string& text, std::size_t line_no) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(fmt::format("line {}: bad integer '{}'", line_no, text));
  }
  return v;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot open {} for writing", path.string()));
  return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(fmt::format("write to {} failed", path.string()));
}

nlohmann::ordered_json real_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::string format_real(double value) { return fmt::format("{:.17g}", value); }

void write_series_csv(std::ostream& out, std::span<const ReturnSeries> series) {
  out << kCsvHeader << '\n';
  for (const auto& s : series) {
    for (const auto& row : s.rows) {
      out << to_string(s.kind) << ',' << s.seed << ',' << format_real(s.x) << ','
          << format_real(row.scale) << ',' << row.value << ',' << to_string(row.flag) << '\n';
    }
  }
}

void emit_csv(const ReturnSeries& series, const std::filesystem::path& path) {
  emit_csv(std::span(&series, 1), path);
}

void emit_csv(std::span<const ReturnSeries> series, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  write_series_csv(out, series);
  check_written(out, path);
}

std::vector<ReturnSeries> parse_series_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error(fmt::format("expected CSV header '{}'", kCsvHeader));
  }
  std::vector<ReturnSeries> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) {
      throw Error(fmt::format("line {}: expected 6 fields, got {}", line_no, f.size()));
    }
    const auto kind = parse_series_kind(f[0]);
    if (!kind) throw Error(fmt::format("line {}: unknown kind '{}'", line_no, f[0]));
    const auto flag = parse_row_flag(f[5]);
    if (!flag) throw Error(fmt::format("line {}: unknown flag '{}'", line_no, f[5]));
    const std::uint64_t seed = parse_count(f[1], line_no);
    const double x = parse_real(f[2], line_no);
    if (out.empty() || out.back().kind != *kind || out.back().seed != seed || out.back().x != x) {
      ReturnSeries s;
      s.kind = *kind;
      s.seed = seed;
      s.x = x;
      out.push_back(std::move(s));
    }
    out.back().rows.push_back({parse_real(f[3], line_no), parse_count(f[4], line_no), *flag});
  }
  return out;
}

std::vector<ReturnSeries> read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  return parse_series_csv(in);
}

std::vector<SymbolSequence> parse_words(std::istream& in) {
  std::vector<std::vector<Symbol>> raw;
  Symbol largest = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::vector<Symbol> word;
    std::string token;
    while (tokens >> token) {
      const std::uint64_t v = parse_count(token, line_no);
      if (v > 0xffffffffULL) throw Error(fmt::format("line {}: symbol too large", line_no));
      word.push_back(static_cast<Symbol>(v));
      largest = std::max(largest, word.back());
    }
    if (!word.empty()) raw.push_back(std::move(word));
  }
  std::vector<SymbolSequence> words;
  for (auto& w : raw) words.emplace_back(std::move(w), static_cast<std::size_t>(largest) + 1, "file");
  return words;
}

std::vector<SymbolSequence> read_words(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  return parse_words(in);
}

nlohmann::ordered_json to_json(const Estimate& e) {
  nlohmann::ordered_json j;
  j["method"] = e.method;
  j["value"] = real_or_null(e.value);
  j["slope"] = real_or_null(e.fit.slope);
  j["intercept"] = real_or_null(e.fit.intercept);
  j["residual_rms"] = real_or_null(e.fit.residual_rms);
  j["scale_min"] = real_or_null(e.scale_min);
  j["scale_max"] = real_or_null(e.scale_max);
  j["n_samples"] = e.n_samples;
  if (e.lower_envelope) j["lower_envelope"] = real_or_null(*e.lower_envelope);
  j["flags"] = e.flags;
  return j;
}

nlohmann::ordered_json to_json(const AggregateEstimate& a) {
  nlohmann::ordered_json j;
  j["method"] = a.method;
  j["mean"] = real_or_null(a.mean);
  j["spread"] = real_or_null(a.spread);
  j["n_seeds"] = a.per_seed.size();
  auto per_seed = nlohmann::ordered_json::array();
  for (const auto& e : a.per_seed) per_seed.push_back(to_json(e));
  j["per_seed"] = std::move(per_seed);
  auto failures = nlohmann::ordered_json::array();
  for (const auto& f : a.failures) failures.push_back({{"seed", f.seed}, {"reason", f.reason}});
  j["failures"] = std::move(failures);
  return j;
}

nlohmann::ordered_json to_json(const ComplexityReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["phrase_count"] = r.phrase_count;
  j["rate_nats"] = real_or_null(r.rate_nats);
  j["flags"] = r.flags;
  return j;
}

nlohmann::ordered_json to_json(const RepetitionBoundReport& r) {
  nlohmann::ordered_json j;
  j["prefix_length"] = r.prefix_length;
  j["total_length"] = r.total_length;
  j["prefix_phrases"] = r.prefix_phrases;
  j["extension_phrases"] = r.extension_phrases;
  j["added"] = r.added;
  j["constant"] = r.constant;
  j["bound"] = real_or_null(r.bound);
  j["slack"] = real_or_null(r.slack);
  j["measured_constant"] = real_or_null(r.measured_constant);
  j["holds"] = r.holds;
  return j;
}

nlohmann::ordered_json to_json(const CrosscheckReport& r) {
  nlohmann::ordered_json j;
  j["entropy"] = real_or_null(r.entropy);
  j["lyapunov"] = real_or_null(r.lyapunov);
  j["dimension"] = real_or_null(r.dimension);
  j["ratio"] = real_or_null(r.ratio);
  j["discrepancy"] = real_or_null(r.discrepancy);
  j["tolerance"] = r.tolerance;
  j["within"] = r.within;
  return j;
}

void write_json(const nlohmann::ordered_json& doc, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
  check_written(out, path);
}

}  // namespace recur
