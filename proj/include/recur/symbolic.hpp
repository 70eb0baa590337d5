#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recur/maps.hpp"
#include "recur/series.hpp"

namespace recur {

using Symbol = std::uint32_t;

/// Partition of [0, 1] into open cells between sorted interior cut points.
/// A point on a cut belongs to the cell on its right.
class Partition {
 public:
  explicit Partition(std::vector<double> cut_points);

  /// Natural monotonicity partition of a finite-branch map.
  static Partition of_map(const IntervalMap& map);

  std::size_t alphabet_size() const { return cuts_.size() + 1; }
  const std::vector<double>& cut_points() const { return cuts_; }
  Symbol cell_of(double x) const;

 private:
  std::vector<double> cuts_;
};

/// Finite word over {0, ..., alphabet_size - 1}.
class SymbolSequence {
 public:
  SymbolSequence() = default;
  SymbolSequence(std::vector<Symbol> symbols, std::size_t alphabet_size, std::string source = {});

  std::span<const Symbol> symbols() const { return symbols_; }
  std::size_t size() const { return symbols_.size(); }
  std::size_t alphabet_size() const { return alphabet_size_; }
  const std::string& source() const { return source_; }
  Symbol operator[](std::size_t i) const { return symbols_[i]; }
  std::span<const Symbol> prefix(std::size_t n) const { return std::span(symbols_).first(n); }

 private:
  std::vector<Symbol> symbols_;
  std::size_t alphabet_size_ = 0;
  std::string source_;
};

/// Boolean adjacency matrix of a topological Markov shift.
class TransitionMatrix {
 public:
  /// rows[i][j] != 0 allows the transition i -> j. Every row and column must
  /// contain at least one allowed transition.
  explicit TransitionMatrix(const std::vector<std::vector<int>>& rows);

  static TransitionMatrix full(std::size_t size);

  std::size_t size() const { return size_; }
  bool allowed(Symbol from, Symbol to) const { return entries_[from * size_ + to] != 0; }
  /// Primitive (topologically mixing): some power is strictly positive.
  bool mixing() const { return mixing_; }
  /// Wielandt bound N^2 - 2N + 2 on the primitivity exponent.
  std::size_t mixing_bound() const;
  bool is_full() const;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint8_t> entries_;
  bool mixing_ = false;
};

/// Transition structure of a Markov built-in, read off its branch images.
TransitionMatrix markov_matrix(const IntervalMap& map);

/// Either the full shift or a topological Markov shift.
class Admissibility {
 public:
  static Admissibility full_shift() { return Admissibility(); }
  static Admissibility markov(TransitionMatrix matrix) { return Admissibility(std::move(matrix)); }

  bool is_full_shift() const { return !matrix_.has_value(); }
  const TransitionMatrix& matrix() const { return *matrix_; }
  bool allowed(Symbol from, Symbol to) const { return !matrix_ || matrix_->allowed(from, to); }
  bool admissible(std::span<const Symbol> word) const;

 private:
  Admissibility() = default;
  explicit Admissibility(TransitionMatrix m) : matrix_(std::move(m)) {}

  std::optional<TransitionMatrix> matrix_;
};

/// Symbol of each orbit point in the partition.
SymbolSequence encode_orbit(const Orbit& orbit, const Partition& partition);

/// Coding by the map's monotonicity branches. Works for the countable Gauss
/// partition; the alphabet is truncated to the largest observed symbol.
SymbolSequence encode_branches(const IntervalMap& map, const Orbit& orbit);

/// I.i.d. word with the given symbol probabilities.
SymbolSequence generate_bernoulli_word(std::size_t alphabet_size,
                                       std::span<const double> probabilities, std::size_t length,
                                       std::uint64_t rng_seed);

/// Border (failure) function: fail[i] is the length of the longest proper
/// border of word[0..i]. Prefix-stable: the table of a prefix is a prefix of
/// the table.
std::vector<std::size_t> border_table(std::span<const Symbol> word);

struct CylinderReturn {
  std::size_t time = 0;
  /// The return needs a connecting path beyond the merged word w[0..k) w
  /// (Markov shifts only; reported separately from direct overlaps).
  bool via_completion = false;
};

/// Poincare return time of the cylinder [w]: the least k > 0 such that the
/// cylinder shifted by k meets itself. For the full shift this is the minimal
/// period of w, found in O(n) from the border table.
CylinderReturn cylinder_return(std::span<const Symbol> word, const Admissibility& admissibility);
std::size_t cylinder_return_time(std::span<const Symbol> word, const Admissibility& admissibility);

/// Same contract by direct double loop over shifts; test oracle.
CylinderReturn cylinder_return_bruteforce(std::span<const Symbol> word,
                                          const Admissibility& admissibility);

/// Cylinder return times of the prefixes of one coded orbit, one row per
/// requested length (scale = n, value = tau of the length-n prefix).
ReturnSeries return_ratio_series(const SymbolSequence& word, std::span<const std::size_t> n_values,
                                 const Admissibility& admissibility);

}  // namespace recur
