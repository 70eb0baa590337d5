#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "recur/symbolic.hpp"

namespace recur {

struct Phrase {
  std::size_t start = 0;
  std::size_t length = 0;

  friend bool operator==(const Phrase&, const Phrase&) = default;
};

struct LZ76Parse {
  std::vector<Phrase> phrases;

  std::size_t phrase_count() const { return phrases.size(); }
};

/// Exhaustive-history Lempel-Ziv (1976) parsing. Each phrase is the shortest
/// extension of the current position that does not occur starting anywhere
/// earlier (the occurrence may overlap the phrase itself). The last phrase
/// may be a repeat, cut off by the end of the word. Linear time via a suffix
/// automaton of the processed prefix.
LZ76Parse lz76_parse(std::span<const Symbol> word);
LZ76Parse lz76_parse(const SymbolSequence& word);

/// Same parse by direct quadratic scan; test oracle.
LZ76Parse lz76_parse_scan(std::span<const Symbol> word);

/// Words shorter than this get a "short-word" flag.
inline constexpr std::size_t kMinReliableLength = 100;

struct ComplexityReport {
  std::size_t n = 0;
  std::size_t phrase_count = 0;
  /// c log2(n) / n, converted to nats per symbol. The c log2(c) / n variant
  /// has the same limit but sits about 20% low at n = 10^6 for fair bits.
  double rate_nats = 0.0;
  std::vector<std::string> flags;
};

ComplexityReport complexity_report(std::span<const Symbol> word);
double complexity_rate(const SymbolSequence& word);

struct RepetitionBoundReport {
  std::size_t prefix_length = 0;
  std::size_t total_length = 0;
  std::size_t prefix_phrases = 0;
  std::size_t extension_phrases = 0;
  /// extension_phrases - prefix_phrases (may be negative).
  long long added = 0;
  double constant = 0.0;
  /// constant * log2(total_length).
  double bound = 0.0;
  double slack = 0.0;
  /// added / log2(total_length).
  double measured_constant = 0.0;
  bool holds = false;
};

inline constexpr double kRepetitionBoundConstant = 10.0;

/// Parses the periodic extension of prefix to total_length and compares its
/// phrase count against the prefix's plus constant * log2(total_length).
RepetitionBoundReport repetition_bound_check(std::span<const Symbol> prefix,
                                             std::size_t total_length,
                                             double constant = kRepetitionBoundConstant);

}  // namespace recur
