#include "recur/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

namespace recur {
namespace {

// Suffix automaton of the whole word. first_end[v] is the end index of the
// first occurrence of the strings in state v.
class SuffixAutomaton {
 public:
  explicit SuffixAutomaton(std::span<const Symbol> word) {
    Symbol largest = 0;
    for (Symbol s : word) largest = std::max(largest, s);
    alphabet_ = static_cast<std::size_t>(largest) + 1;
    dense_ = alphabet_ <= kDenseAlphabet;
    const std::size_t capacity = 2 * word.size() + 1;
    len_.reserve(capacity);
    link_.reserve(capacity);
    first_end_.reserve(capacity);
    if (dense_) {
      next_.reserve(capacity * alphabet_);
    } else {
      sparse_.reserve(capacity);
    }
    add_state(0, -1, 0);
    for (std::size_t i = 0; i < word.size(); ++i) extend(word[i], static_cast<std::int64_t>(i));
  }

  std::int32_t step(std::int32_t v, Symbol c) const {
    if (dense_) return c < alphabet_ ? next_[static_cast<std::size_t>(v) * alphabet_ + c] : -1;
    const auto& out = sparse_[static_cast<std::size_t>(v)];
    const auto it = out.find(c);
    return it == out.end() ? -1 : it->second;
  }

  std::int64_t first_end(std::int32_t v) const { return first_end_[static_cast<std::size_t>(v)]; }

 private:
  static constexpr std::size_t kDenseAlphabet = 8;

  std::int32_t add_state(std::size_t len, std::int32_t link, std::int64_t first_end) {
    len_.push_back(len);
    link_.push_back(link);
    first_end_.push_back(first_end);
    if (dense_) {
      next_.resize(next_.size() + alphabet_, -1);
    } else {
      sparse_.emplace_back();
    }
    return static_cast<std::int32_t>(len_.size() - 1);
  }

  void set(std::int32_t v, Symbol c, std::int32_t to) {
    if (dense_) {
      next_[static_cast<std::size_t>(v) * alphabet_ + c] = to;
    } else {
      sparse_[static_cast<std::size_t>(v)][c] = to;
    }
  }

  void copy_transitions(std::int32_t from, std::int32_t to) {
    if (dense_) {
      std::copy_n(next_.begin() + static_cast<std::ptrdiff_t>(from) * alphabet_, alphabet_,
                  next_.begin() + static_cast<std::ptrdiff_t>(to) * alphabet_);
      return;
    }
    sparse_[static_cast<std::size_t>(to)] = sparse_[static_cast<std::size_t>(from)];
  }

  void extend(Symbol c, std::int64_t pos) {
    const std::int32_t cur = add_state(len_[static_cast<std::size_t>(last_)] + 1, -1, pos);
    std::int32_t p = last_;
    while (p != -1 && step(p, c) == -1) {
      set(p, c, cur);
      p = link_[static_cast<std::size_t>(p)];
    }
    if (p == -1) {
      link_[static_cast<std::size_t>(cur)] = 0;
    } else {
      const std::int32_t q = step(p, c);
      if (len_[static_cast<std::size_t>(p)] + 1 == len_[static_cast<std::size_t>(q)]) {
        link_[static_cast<std::size_t>(cur)] = q;
      } else {
        const std::int32_t clone = add_state(len_[static_cast<std::size_t>(p)] + 1,
                                             link_[static_cast<std::size_t>(q)],
                                             first_end_[static_cast<std::size_t>(q)]);
        copy_transitions(q, clone);
        while (p != -1 && step(p, c) == q) {
          set(p, c, clone);
          p = link_[static_cast<std::size_t>(p)];
        }
        link_[static_cast<std::size_t>(q)] = clone;
        link_[static_cast<std::size_t>(cur)] = clone;
      }
    }
    last_ = cur;
  }

  std::size_t alphabet_ = 0;
  bool dense_ = true;
  std::vector<std::size_t> len_;
  std::vector<std::int32_t> link_;
  std::vector<std::int64_t> first_end_;
  std::vector<std::int32_t> next_;
  std::vector<std::unordered_map<Symbol, std::int32_t>> sparse_;
  std::int32_t last_ = 0;
};

}  // namespace

LZ76Parse lz76_parse(std::span<const Symbol> word) {
  if (word.empty()) throw std::invalid_argument("cannot parse an empty word");
  if (word.size() >= (std::size_t{1} << 30)) throw std::invalid_argument("word too long");
  const SuffixAutomaton automaton(word);
  const auto n = static_cast<std::int64_t>(word.size());
  LZ76Parse parse;
  std::int64_t p = 0;
  while (p < n) {
    // Longest L such that word[p, p+L) first occurs at a start before p.
    std::int32_t state = 0;
    std::int64_t matched = 0;
    while (p + matched < n) {
      const std::int32_t next = automaton.step(state, word[static_cast<std::size_t>(p + matched)]);
      if (next == -1 || automaton.first_end(next) - matched >= p) break;
      state = next;
      ++matched;
    }
    const std::int64_t length = std::min(matched + 1, n - p);
    parse.phrases.push_back({static_cast<std::size_t>(p), static_cast<std::size_t>(length)});
    p += length;
  }
  return parse;
}

LZ76Parse lz76_parse(const SymbolSequence& word) { return lz76_parse(word.symbols()); }

LZ76Parse lz76_parse_scan(std::span<const Symbol> word) {
  if (word.empty()) throw std::invalid_argument("cannot parse an empty word");
  const std::size_t n = word.size();
  LZ76Parse parse;
  std::size_t p = 0;
  while (p < n) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < p; ++i) {
      std::size_t l = 0;
      while (p + l < n && word[i + l] == word[p + l]) ++l;
      best = std::max(best, l);
    }
    const std::size_t length = std::min(best + 1, n - p);
    parse.phrases.push_back({p, length});
    p += length;
  }
  return parse;
}

ComplexityReport complexity_report(std::span<const Symbol> word) {
  ComplexityReport report;
  report.n = word.size();
  report.phrase_count = lz76_parse(word).phrase_count();
  const double c = static_cast<double>(report.phrase_count);
  const double n = static_cast<double>(report.n);
  report.rate_nats = c * std::log2(n) / n * std::log(2.0);
  if (report.n < kMinReliableLength) report.flags.emplace_back("short-word");
  return report;
}

double complexity_rate(const SymbolSequence& word) {
  return complexity_report(word.symbols()).rate_nats;
}

RepetitionBoundReport repetition_bound_check(std::span<const Symbol> prefix,
                                             std::size_t total_length, double constant) {
  if (prefix.empty()) throw std::invalid_argument("prefix must be nonempty");
  if (total_length < prefix.size()) {
    throw std::invalid_argument("total length must be at least the prefix length");
  }
  std::vector<Symbol> extension(total_length);
  for (std::size_t i = 0; i < total_length; ++i) extension[i] = prefix[i % prefix.size()];

  RepetitionBoundReport r;
  r.prefix_length = prefix.size();
  r.total_length = total_length;
  r.prefix_phrases = lz76_parse(prefix).phrase_count();
  r.extension_phrases = lz76_parse(extension).phrase_count();
  r.added = static_cast<long long>(r.extension_phrases) - static_cast<long long>(r.prefix_phrases);
  const double log_n = std::log2(static_cast<double>(total_length));
  r.constant = constant;
  r.bound = constant * log_n;
  r.slack = r.bound - static_cast<double>(r.added);
  r.measured_constant = log_n > 0.0 ? static_cast<double>(r.added) / log_n : 0.0;
  r.holds = static_cast<double>(r.added) <= r.bound;
  return r;
}

}  // namespace recur
