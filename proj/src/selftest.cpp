#include "recur/selftest.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "recur/complexity.hpp"
#include "recur/maps.hpp"
#include "recur/recurrence.hpp"
#include "recur/rng.hpp"
#include "recur/symbolic.hpp"

namespace recur {
namespace {

std::vector<Symbol> random_word(Rng& rng, std::size_t length, std::size_t alphabet) {
  std::vector<Symbol> w(length);
  for (auto& s : w) s = static_cast<Symbol>(rng.bits() % alphabet);
  return w;
}

SelftestCheck cylinder_full_shift(Rng& rng) {
  const auto full = Admissibility::full_shift();
  std::size_t checked = 0;
  for (std::size_t n = 1; n <= 12; ++n) {
    std::vector<Symbol> w(n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
      for (std::size_t i = 0; i < n; ++i) w[i] = static_cast<Symbol>((bits >> i) & 1U);
      if (cylinder_return_time(w, full) != cylinder_return_bruteforce(w, full).time) {
        return {"cylinder-full-shift", false, fmt::format("binary word {} of length {}", bits, n)};
      }
      ++checked;
    }
  }
  for (int trial = 0; trial < 2000; ++trial) {
    const auto w = random_word(rng, 1 + rng.bits() % 120, 3);
    if (cylinder_return_time(w, full) != cylinder_return_bruteforce(w, full).time) {
      return {"cylinder-full-shift", false, "random ternary word"};
    }
    ++checked;
  }
  return {"cylinder-full-shift", true, fmt::format("{} words", checked)};
}

SelftestCheck cylinder_markov(Rng& rng) {
  // Golden-mean shift: 1 -> 1 forbidden.
  const auto adm = Admissibility::markov(TransitionMatrix({{1, 1}, {1, 0}}));
  std::size_t checked = 0;
  std::size_t completions = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.bits() % 60;
    std::vector<Symbol> w;
    Symbol prev = static_cast<Symbol>(rng.bits() & 1U);
    w.push_back(prev);
    while (w.size() < n) {
      prev = prev == 1 ? 0 : static_cast<Symbol>(rng.bits() & 1U);
      w.push_back(prev);
    }
    const auto fast = cylinder_return(w, adm);
    const auto slow = cylinder_return_bruteforce(w, adm);
    if (fast.time != slow.time || fast.via_completion != slow.via_completion) {
      return {"cylinder-markov", false, fmt::format("word of length {}", n)};
    }
    completions += fast.via_completion ? 1 : 0;
    ++checked;
  }
  return {"cylinder-markov", true, fmt::format("{} words, {} via completion", checked, completions)};
}

SelftestCheck repetition(Rng& rng) {
  for (int trial = 0; trial < 300; ++trial) {
    const auto w = random_word(rng, 200 + rng.bits() % 300, 2 + rng.bits() % 2);
    const std::size_t ns[] = {1, 2, 3, 5, 8};
    const auto fast = repetition_times(w, ns);
    for (std::size_t j = 0; j < std::size(ns); ++j) {
      std::uint64_t naive = 0;
      for (std::size_t k = 1; k + ns[j] <= w.size() && naive == 0; ++k) {
        if (std::equal(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(ns[j]),
                       w.begin() + static_cast<std::ptrdiff_t>(k))) {
          naive = k;
        }
      }
      if (naive == 0 ? fast[j].ok() : (!fast[j].ok() || fast[j].value != naive)) {
        return {"repetition-time", false, fmt::format("n = {}", ns[j])};
      }
    }
  }
  return {"repetition-time", true, "300 words"};
}

SelftestCheck lz76(Rng& rng) {
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t alphabet = 1 + rng.bits() % 12;
    const auto w = random_word(rng, 1 + rng.bits() % 400, alphabet);
    if (!(lz76_parse(w).phrases == lz76_parse_scan(w).phrases)) {
      return {"lz76-parse", false, fmt::format("alphabet {} length {}", alphabet, w.size())};
    }
  }
  return {"lz76-parse", true, "300 words"};
}

SelftestCheck interval_images(Rng& rng) {
  const std::vector<IntervalMap> maps = {make_builtin_map("tripling"),
                                         make_builtin_map("logistic", std::vector<double>{3.8}),
                                         make_builtin_map("rotation", std::vector<double>{0.3}),
                                         make_builtin_map("gauss")};
  for (const auto& map : maps) {
    for (int trial = 0; trial < 50; ++trial) {
      const double a = 0.05 + 0.9 * rng.uniform();
      const double w = 0.001 + 0.05 * rng.uniform();
      const IntervalUnion u{{a, std::min(1.0, a + w)}};
      const IntervalUnion image = image_of_union(map, u);
      for (int s = 0; s <= 400; ++s) {
        const double x = u.intervals()[0].lo + (u.intervals()[0].hi - u.intervals()[0].lo) * s / 400.0;
        const double y = map(x);
        bool near = false;
        for (const auto& iv : image.intervals()) near = near || (y >= iv.lo - 1e-9 && y <= iv.hi + 1e-9);
        if (!near) return {"interval-image", false, fmt::format("{} at x = {}", map.name(), x)};
      }
    }
  }
  return {"interval-image", true, "200 intervals"};
}

SelftestCheck point_scan(Rng& rng) {
  const IntervalMap map = make_builtin_map("tripling");
  const std::vector<double> scales = {0.1, 0.03, 0.01, 0.003};
  for (int trial = 0; trial < 20; ++trial) {
    const double x = rng.uniform();
    const auto series = scan_scales(SeriesKind::point_return, map, x, scales);
    for (std::size_t j = 0; j < scales.size(); ++j) {
      const auto direct = point_return_time(map, x, scales[j], default_point_budget(scales[j]));
      if (direct.value != series.rows[j].value || direct.status != series.rows[j].flag) {
        return {"point-return-scan", false, fmt::format("x = {} r = {}", x, scales[j])};
      }
    }
  }
  return {"point-return-scan", true, "20 points"};
}

}  // namespace

std::vector<SelftestCheck> run_selftest(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<SelftestCheck> checks;
  checks.push_back(cylinder_full_shift(rng));
  checks.push_back(cylinder_markov(rng));
  checks.push_back(repetition(rng));
  checks.push_back(lz76(rng));
  checks.push_back(interval_images(rng));
  checks.push_back(point_scan(rng));
  return checks;
}

}  // namespace recur
