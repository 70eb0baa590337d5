#include "recur/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "recur/error.hpp"
#include "recur/rng.hpp"

namespace recur {

Partition::Partition(std::vector<double> cut_points) : cuts_(std::move(cut_points)) {
  for (std::size_t i = 0; i < cuts_.size(); ++i) {
    if (!(cuts_[i] > 0.0 && cuts_[i] < 1.0)) {
      throw std::invalid_argument(fmt::format("cut point {} outside (0, 1)", cuts_[i]));
    }
    if (i > 0 && !(cuts_[i - 1] < cuts_[i])) {
      throw std::invalid_argument("cut points must be strictly increasing");
    }
  }
}

Partition Partition::of_map(const IntervalMap& map) { return Partition(map.cuts()); }

Symbol Partition::cell_of(double x) const {
  return static_cast<Symbol>(std::upper_bound(cuts_.begin(), cuts_.end(), x) - cuts_.begin());
}

SymbolSequence::SymbolSequence(std::vector<Symbol> symbols, std::size_t alphabet_size,
                               std::string source)
    : symbols_(std::move(symbols)), alphabet_size_(alphabet_size), source_(std::move(source)) {
  for (Symbol s : symbols_) {
    if (s >= alphabet_size_) {
      throw std::invalid_argument(
          fmt::format("symbol {} outside alphabet of size {}", s, alphabet_size_));
    }
  }
}

TransitionMatrix::TransitionMatrix(const std::vector<std::vector<int>>& rows) : size_(rows.size()) {
  if (size_ == 0) throw std::invalid_argument("empty transition matrix");
  entries_.assign(size_ * size_, 0);
  for (std::size_t i = 0; i < size_; ++i) {
    if (rows[i].size() != size_) throw std::invalid_argument("transition matrix must be square");
    for (std::size_t j = 0; j < size_; ++j) entries_[i * size_ + j] = rows[i][j] != 0 ? 1 : 0;
  }
  for (std::size_t i = 0; i < size_; ++i) {
    bool row = false;
    bool col = false;
    for (std::size_t j = 0; j < size_; ++j) {
      row = row || entries_[i * size_ + j];
      col = col || entries_[j * size_ + i];
    }
    if (!row || !col) {
      throw std::invalid_argument(fmt::format("symbol {} has no successor or predecessor", i));
    }
  }

  // Primitive iff A^(N^2-2N+2) is strictly positive.
  std::vector<std::uint8_t> power = entries_;
  for (std::size_t step = 1; step < mixing_bound(); ++step) {
    std::vector<std::uint8_t> next(size_ * size_, 0);
    for (std::size_t i = 0; i < size_; ++i) {
      for (std::size_t k = 0; k < size_; ++k) {
        if (!power[i * size_ + k]) continue;
        for (std::size_t j = 0; j < size_; ++j) {
          next[i * size_ + j] |= entries_[k * size_ + j];
        }
      }
    }
    power.swap(next);
  }
  mixing_ = std::all_of(power.begin(), power.end(), [](std::uint8_t v) { return v != 0; });
}

TransitionMatrix TransitionMatrix::full(std::size_t size) {
  return TransitionMatrix(std::vector<std::vector<int>>(size, std::vector<int>(size, 1)));
}

std::size_t TransitionMatrix::mixing_bound() const { return size_ * size_ - 2 * size_ + 2; }

bool TransitionMatrix::is_full() const {
  return std::all_of(entries_.begin(), entries_.end(), [](std::uint8_t v) { return v != 0; });
}

TransitionMatrix markov_matrix(const IntervalMap& map) {
  if (!map.markov()) {
    throw std::invalid_argument(fmt::format("map '{}' has no Markov partition", map.name()));
  }
  const std::size_t n = map.branch_count();
  std::vector<std::vector<int>> rows(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const Interval dom = map.branch_domain(i);
    const double a = map.eval(i, dom.lo);
    const double b = map.eval(i, dom.hi);
    const Interval image{std::min(a, b), std::max(a, b)};
    for (std::size_t j = 0; j < n; ++j) {
      const Interval cell = map.branch_domain(j);
      rows[i][j] = image.lo <= cell.lo && cell.hi <= image.hi ? 1 : 0;
    }
  }
  return TransitionMatrix(rows);
}

bool Admissibility::admissible(std::span<const Symbol> word) const {
  if (!matrix_) return true;
  for (Symbol s : word) {
    if (s >= matrix_->size()) return false;
  }
  for (std::size_t i = 0; i + 1 < word.size(); ++i) {
    if (!matrix_->allowed(word[i], word[i + 1])) return false;
  }
  return true;
}

SymbolSequence encode_orbit(const Orbit& orbit, const Partition& partition) {
  std::vector<Symbol> symbols;
  symbols.reserve(orbit.length());
  for (double p : orbit.points) symbols.push_back(partition.cell_of(p));
  return SymbolSequence(std::move(symbols), partition.alphabet_size(), "orbit");
}

SymbolSequence encode_branches(const IntervalMap& map, const Orbit& orbit) {
  std::vector<Symbol> symbols;
  symbols.reserve(orbit.length());
  Symbol largest = 0;
  for (double p : orbit.points) {
    const auto k = static_cast<Symbol>(map.branch_index(p));
    largest = std::max(largest, k);
    symbols.push_back(k);
  }
  const std::size_t alphabet = map.family() == MapFamily::gauss
                                   ? static_cast<std::size_t>(largest) + 1
                                   : map.branch_count();
  return SymbolSequence(std::move(symbols), alphabet, map.name());
}

SymbolSequence generate_bernoulli_word(std::size_t alphabet_size,
                                       std::span<const double> probabilities, std::size_t length,
                                       std::uint64_t rng_seed) {
  if (alphabet_size == 0 || probabilities.size() != alphabet_size) {
    throw std::invalid_argument("probability vector must have one entry per symbol");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument(fmt::format("invalid probability {}", p));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument(fmt::format("probabilities sum to {}, not 1", total));
  }
  std::vector<double> cumulative(alphabet_size);
  std::partial_sum(probabilities.begin(), probabilities.end(), cumulative.begin());
  Symbol last_positive = 0;
  for (std::size_t j = 0; j < alphabet_size; ++j) {
    if (probabilities[j] > 0.0) last_positive = static_cast<Symbol>(j);
  }

  Rng rng(rng_seed);
  std::vector<Symbol> symbols(length);
  for (auto& s : symbols) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    s = it == cumulative.end() ? last_positive : static_cast<Symbol>(it - cumulative.begin());
  }
  return SymbolSequence(std::move(symbols), alphabet_size, fmt::format("bernoulli:{}", rng_seed));
}

std::vector<std::size_t> border_table(std::span<const Symbol> word) {
  std::vector<std::size_t> fail(word.size(), 0);
  std::size_t k = 0;
  for (std::size_t i = 1; i < word.size(); ++i) {
    while (k > 0 && word[i] != word[k]) k = fail[k - 1];
    if (word[i] == word[k]) ++k;
    fail[i] = k;
  }
  return fail;
}

namespace {

void require_nonempty(std::span<const Symbol> word) {
  if (word.empty()) throw std::invalid_argument("cylinder word must be nonempty");
}

// Least L >= 2 with a path of exactly L edges from -> to, by layered search.
std::size_t completion_length(const TransitionMatrix& m, Symbol from, Symbol to) {
  const std::size_t n = m.size();
  std::vector<std::uint8_t> frontier(n, 0);
  frontier[from] = 1;
  const std::size_t limit = std::max<std::size_t>(2, m.mixing_bound()) + 1;
  for (std::size_t length = 1; length <= limit; ++length) {
    std::vector<std::uint8_t> next(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!frontier[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (m.allowed(static_cast<Symbol>(i), static_cast<Symbol>(j))) next[j] = 1;
      }
    }
    frontier.swap(next);
    if (length >= 2 && frontier[to]) return length;
  }
  return 0;
}

// Fast path given the border table of (at least) this word.
CylinderReturn fast_return(std::span<const Symbol> word, std::span<const std::size_t> fail,
                           const Admissibility& adm) {
  const std::size_t n = word.size();
  const std::size_t period = n - fail[n - 1];
  if (adm.is_full_shift()) return {period, false};

  // For a proper period p < n the merged word only repeats transitions of w,
  // so it is admissible exactly when w is. Only p = n adds the edge
  // w[n-1] -> w[0].
  if (period < n) return {period, false};
  const TransitionMatrix& m = adm.matrix();
  if (m.allowed(word[n - 1], word[0])) return {n, false};
  if (!m.mixing()) {
    throw NonMixingError(fmt::format(
        "no admissible return <= {} and the transition matrix is not mixing", n));
  }
  const std::size_t length = completion_length(m, word[n - 1], word[0]);
  if (length == 0) throw NonMixingError("no connecting path within the mixing bound");
  return {n + length - 1, true};
}

void require_admissible(std::span<const Symbol> word, const Admissibility& adm) {
  if (!adm.admissible(word)) {
    throw InadmissibleWordError("cylinder word is not admissible: the cylinder is empty");
  }
}

}  // namespace

CylinderReturn cylinder_return(std::span<const Symbol> word, const Admissibility& admissibility) {
  require_nonempty(word);
  require_admissible(word, admissibility);
  const auto fail = border_table(word);
  return fast_return(word, fail, admissibility);
}

std::size_t cylinder_return_time(std::span<const Symbol> word, const Admissibility& admissibility) {
  return cylinder_return(word, admissibility).time;
}

CylinderReturn cylinder_return_bruteforce(std::span<const Symbol> word,
                                          const Admissibility& admissibility) {
  require_nonempty(word);
  require_admissible(word, admissibility);
  const std::size_t n = word.size();
  for (std::size_t k = 1; k <= n; ++k) {
    bool overlap = true;
    for (std::size_t i = 0; i + k < n && overlap; ++i) overlap = word[i] == word[i + k];
    if (!overlap) continue;
    std::vector<Symbol> merged(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(k));
    merged.insert(merged.end(), word.begin(), word.end());
    if (admissibility.admissible(merged)) return {k, false};
  }
  if (admissibility.is_full_shift()) return {n, false};  // unreachable: k = n always overlaps

  const TransitionMatrix& m = admissibility.matrix();
  if (!m.mixing()) {
    throw NonMixingError(fmt::format(
        "no admissible return <= {} and the transition matrix is not mixing", n));
  }
  // Gap words of increasing length via boolean matrix powers.
  const std::size_t size = m.size();
  std::vector<std::vector<bool>> power(size, std::vector<bool>(size));
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j = 0; j < size; ++j) {
      power[i][j] = m.allowed(static_cast<Symbol>(i), static_cast<Symbol>(j));
    }
  }
  const std::size_t limit = std::max<std::size_t>(2, m.mixing_bound()) + 1;
  for (std::size_t length = 2; length <= limit; ++length) {
    std::vector<std::vector<bool>> next(size, std::vector<bool>(size));
    for (std::size_t i = 0; i < size; ++i) {
      for (std::size_t j = 0; j < size; ++j) {
        bool any = false;
        for (std::size_t k = 0; k < size && !any; ++k) {
          any = power[i][k] && m.allowed(static_cast<Symbol>(k), static_cast<Symbol>(j));
        }
        next[i][j] = any;
      }
    }
    power.swap(next);
    if (power[word[n - 1]][word[0]]) return {n + length - 1, true};
  }
  throw NonMixingError("no connecting path within the mixing bound");
}

ReturnSeries return_ratio_series(const SymbolSequence& word, std::span<const std::size_t> n_values,
                                 const Admissibility& admissibility) {
  ReturnSeries series;
  series.kind = SeriesKind::cylinder_return;
  const std::size_t longest =
      n_values.empty() ? 0 : *std::max_element(n_values.begin(), n_values.end());
  if (longest > word.size()) {
    throw std::invalid_argument(
        fmt::format("requested prefix {} exceeds word length {}", longest, word.size()));
  }
  const auto symbols = word.symbols();
  const auto fail = border_table(symbols.first(longest));

  // Prefix w[0..n) is admissible iff n <= first_bad + 1.
  std::size_t first_bad = longest;
  if (!admissibility.is_full_shift()) {
    for (std::size_t i = 0; i < longest; ++i) {
      if (symbols[i] >= admissibility.matrix().size()) {
        throw InadmissibleWordError(fmt::format("symbol {} outside the shift alphabet", symbols[i]));
      }
    }
    for (std::size_t i = 0; i + 1 < longest; ++i) {
      if (!admissibility.allowed(symbols[i], symbols[i + 1])) {
        first_bad = i;
        break;
      }
    }
  }
  for (std::size_t n : n_values) {
    if (n == 0) throw std::invalid_argument("prefix lengths must be positive");
    if (n > first_bad + 1) {
      throw InadmissibleWordError(fmt::format("prefix of length {} is not admissible", n));
    }
    const auto result = fast_return(symbols.first(n), std::span(fail).first(n), admissibility);
    series.rows.push_back({static_cast<double>(n), result.time, RowFlag::ok});
  }
  return series;
}

}  // namespace recur
