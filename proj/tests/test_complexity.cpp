#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "recur/complexity.hpp"
#include "recur/rng.hpp"
#include "recur/symbolic.hpp"

using namespace recur;

namespace {

std::vector<Symbol> random_word(Rng& rng, std::size_t alphabet, std::size_t length) {
  std::vector<Symbol> w(length);
  for (auto& s : w) s = static_cast<Symbol>(rng.bits() % alphabet);
  return w;
}

std::vector<Symbol> concat(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  std::vector<Symbol> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

// Exhaustive-history phrase count straight from the definition: a phrase is
// the shortest extension that has not occurred starting before its start.
std::size_t definition_phrase_count(const std::vector<Symbol>& w) {
  std::size_t count = 0;
  std::size_t p = 0;
  while (p < w.size()) {
    std::size_t len = 1;
    for (; p + len <= w.size(); ++len) {
      bool seen = false;
      for (std::size_t q = 0; q < p && !seen; ++q) {
        seen = std::equal(w.begin() + static_cast<std::ptrdiff_t>(p), w.begin() + static_cast<std::ptrdiff_t>(p + len),
                          w.begin() + static_cast<std::ptrdiff_t>(q));
      }
      if (!seen) break;
    }
    p += std::min(len, w.size() - p);
    ++count;
  }
  return count;
}

}  // namespace

TEST_SUITE("complexity") {
  TEST_CASE("hand-traced parses") {
    const std::vector<Symbol> zeros(6, 0);
    const auto a = lz76_parse(zeros);
    REQUIRE(a.phrase_count() == 2);
    CHECK(a.phrases[0] == Phrase{0, 1});
    CHECK(a.phrases[1] == Phrase{1, 5});
    CHECK(lz76_parse(std::vector<Symbol>{0, 1}).phrase_count() == 2);
    // 0 | 1 | 011 | 0100 | 1
    const auto b = lz76_parse(std::vector<Symbol>{0, 1, 0, 1, 1, 0, 1, 0, 0, 1});
    CHECK(b.phrase_count() == definition_phrase_count({0, 1, 0, 1, 1, 0, 1, 0, 0, 1}));
    CHECK_THROWS(lz76_parse(std::vector<Symbol>{}));
  }

  TEST_CASE("fast parse equals the scan parse and the definition") {
    Rng rng(61);
    for (int t = 0; t < 300; ++t) {
      const std::size_t alphabet = 1 + t % 12;
      auto w = random_word(rng, alphabet, 1 + rng.bits() % 150);
      if (t % 4 == 0) {
        const std::size_t p = 1 + rng.bits() % 5;
        for (std::size_t i = p; i < w.size(); ++i) w[i] = w[i - p];
      }
      const auto fast = lz76_parse(w);
      REQUIRE(fast.phrases == lz76_parse_scan(w).phrases);
      REQUIRE(fast.phrase_count() == definition_phrase_count(w));
    }
  }

  TEST_CASE("phrases partition the word") {
    Rng rng(67);
    for (int t = 0; t < 100; ++t) {
      const auto w = random_word(rng, 2 + t % 3, 2000);
      const auto parse = lz76_parse(w);
      std::size_t pos = 0;
      for (const auto& ph : parse.phrases) {
        CHECK(ph.start == pos);
        CHECK(ph.length >= 1);
        pos += ph.length;
      }
      CHECK(pos == w.size());
    }
  }

  TEST_CASE("concatenation is nearly subadditive") {
    Rng rng(71);
    for (int t = 0; t < 200; ++t) {
      const auto u = random_word(rng, 2, 1 + rng.bits() % 500);
      const auto v = random_word(rng, 2, 1 + rng.bits() % 500);
      CHECK(lz76_parse(concat(u, v)).phrase_count() <=
            lz76_parse(u).phrase_count() + lz76_parse(v).phrase_count() + 1);
    }
  }

  TEST_CASE("relabeling symbols leaves the rate unchanged") {
    Rng rng(73);
    const auto w = random_word(rng, 4, 5000);
    std::vector<Symbol> perm{2, 0, 3, 1};
    std::vector<Symbol> relabeled;
    for (Symbol s : w) relabeled.push_back(perm[s]);
    CHECK(complexity_rate(SymbolSequence(w, 4)) == complexity_rate(SymbolSequence(relabeled, 4)));
  }

  TEST_CASE("fair bits: normalized phrase count near one") {
    const std::vector<double> half{0.5, 0.5};
    const auto w = generate_bernoulli_word(2, half, 100000, 5);
    const double c = static_cast<double>(lz76_parse(w).phrase_count());
    const double normalized = c * std::log2(1e5) / 1e5;
    CHECK(normalized >= 0.9);
    CHECK(normalized <= 1.1);
  }

  TEST_CASE("report units and short-word flag") {
    const std::vector<double> half{0.5, 0.5};
    const auto w = generate_bernoulli_word(2, half, 50000, 6);
    const auto report = complexity_report(w.symbols());
    const double c = static_cast<double>(report.phrase_count);
    CHECK(report.rate_nats == doctest::Approx(c * std::log2(50000.0) / 50000 * std::log(2.0)));
    CHECK(report.flags.empty());
    const auto tiny = complexity_report(std::vector<Symbol>{0, 1, 1});
    REQUIRE(tiny.flags.size() == 1);
    CHECK(tiny.flags[0] == "short-word");
  }

  TEST_CASE("constant words have vanishing rate") {
    double previous = 1.0;
    for (std::size_t n : {100u, 1000u, 10000u, 100000u}) {
      const double rate = complexity_rate(SymbolSequence(std::vector<Symbol>(n, 0), 1));
      CHECK(rate < previous);
      previous = rate;
    }
    CHECK(previous < 1e-3);
  }

  TEST_CASE("repetition bound examples") {
    const auto small = repetition_bound_check(std::vector<Symbol>{0, 1, 1}, 10000);
    CHECK(small.holds);
    CHECK(small.extension_phrases <= small.prefix_phrases + 3);
    CHECK(small.bound == doctest::Approx(10 * std::log2(10000.0)));

    const auto single = repetition_bound_check(std::vector<Symbol>{1}, 10000);
    CHECK(single.extension_phrases == 2);
    CHECK(single.holds);

    Rng rng(79);
    const auto w = random_word(rng, 2, 500);
    const auto whole = repetition_bound_check(w, w.size());
    CHECK(whole.added == 0);
    CHECK(whole.holds);
  }

  TEST_CASE("periodic extensions add few phrases") {
    Rng rng(83);
    for (int t = 0; t < 100; ++t) {
      const auto prefix = random_word(rng, 2, 1 + rng.bits() % 300);
      const auto report = repetition_bound_check(prefix, 10000);
      CHECK(report.holds);
      CHECK(report.added <= static_cast<long long>(std::ceil(report.bound)));
      CHECK(report.slack == doctest::Approx(report.bound - static_cast<double>(report.added)));
    }
  }
}
