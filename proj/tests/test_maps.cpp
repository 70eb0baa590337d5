#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "recur/error.hpp"
#include "recur/maps.hpp"
#include "recur/rng.hpp"

using namespace recur;

namespace {

std::vector<IntervalMap> all_maps() {
  return {make_builtin_map("tripling"),
          make_builtin_map("doubling"),
          make_builtin_map("tent"),
          make_builtin_map("logistic", std::vector<double>{4.0}),
          make_builtin_map("logistic", std::vector<double>{3.7}),
          make_builtin_map("gauss"),
          make_builtin_map("rotation", std::vector<double>{0.25}),
          make_builtin_map("manneville-pomeau", std::vector<double>{0.5})};
}

// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
template <typename Cdf>
double ks_distance(std::vector<double> sample, Cdf cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

double arcsine_cdf(double x) { return 2.0 / std::numbers::pi * std::asin(std::sqrt(x)); }
double gauss_cdf(double x) { return std::log2(1.0 + x); }

}  // namespace

TEST_SUITE("maps") {
  TEST_CASE("tripling has three increasing slope-3 branches") {
    const auto m = make_builtin_map("tripling");
    REQUIRE(m.branch_count() == 3);
    CHECK(m.markov());
    for (std::size_t k = 0; k < 3; ++k) {
      const Interval d = m.branch_domain(k);
      CHECK(d.lo == doctest::Approx(k / 3.0));
      CHECK(d.hi == doctest::Approx((k + 1) / 3.0));
      CHECK(m.branch_direction(k) == Monotone::increasing);
      CHECK(m.derivative(k, (d.lo + d.hi) / 2) == 3.0);
    }
  }

  TEST_CASE("rotation has two branches of slope one") {
    const auto m = make_builtin_map("rotation", std::vector<double>{0.25});
    REQUIRE(m.branch_count() == 2);
    CHECK(m.zero_entropy());
    CHECK(m.derivative(0, 0.1) == 1.0);
    CHECK(m.derivative(1, 0.9) == 1.0);
  }

  TEST_CASE("gauss digit k lives on (1/(k+1), 1/k)") {
    const auto m = make_builtin_map("gauss");
    CHECK(m.branch_count() == kGaussDefaultBranches);
    for (std::size_t digit : {1u, 2u, 7u, 1000u}) {
      const Interval d = m.branch_domain(digit - 1);
      CHECK(d.lo == doctest::Approx(1.0 / (digit + 1)));
      CHECK(d.hi == doctest::Approx(1.0 / digit));
      CHECK(m.branch_direction(digit - 1) == Monotone::decreasing);
      const double x = (d.lo + d.hi) / 2;
      CHECK(m.branch_index(x) == digit - 1);
      CHECK(m(x) == doctest::Approx(1.0 / x - std::floor(1.0 / x)));
    }
    CHECK_THROWS_AS(m.branch_index(1e-7), BranchTruncationError);
    CHECK_THROWS_AS(m.cuts(), Error);
    const auto wide = make_builtin_map("gauss", std::vector<double>{1e9});
    CHECK_NOTHROW(wide.branch_index(1e-7));
  }

  TEST_CASE("markov flags follow the standard partitions") {
    CHECK(make_builtin_map("doubling").markov());
    CHECK(make_builtin_map("tent").markov());
    CHECK(make_builtin_map("logistic", std::vector<double>{4.0}).markov());
    CHECK_FALSE(make_builtin_map("logistic", std::vector<double>{3.7}).markov());
    CHECK_FALSE(make_builtin_map("rotation", std::vector<double>{0.3}).markov());
  }

  TEST_CASE("bad names and parameters are rejected") {
    CHECK_THROWS_AS(make_builtin_map("henon"), UnknownMapError);
    CHECK_THROWS_AS(make_builtin_map("logistic", std::vector<double>{4.5}), ParameterError);
    CHECK_THROWS_AS(make_builtin_map("logistic", std::vector<double>{0.0}), ParameterError);
    CHECK_THROWS_AS(make_builtin_map("logistic"), ParameterError);
    CHECK_THROWS_AS(make_builtin_map("rotation", std::vector<double>{1.2}), ParameterError);
    CHECK_THROWS_AS(make_builtin_map("tripling", std::vector<double>{1.0}), ParameterError);
    CHECK_THROWS_AS(make_builtin_map("manneville-pomeau", std::vector<double>{-1.0}), ParameterError);
    CHECK_THROWS_AS(make_builtin_map("gauss", std::vector<double>{1.5}), ParameterError);
  }

  TEST_CASE("boundary points go to the branch on the right, 1 to the last") {
    const auto m = make_builtin_map("tripling");
    CHECK(m.branch_index(0.0) == 0);
    CHECK(m.branch_index(m.cuts()[0]) == 1);
    CHECK(m.branch_index(m.cuts()[1]) == 2);
    CHECK(m.branch_index(1.0) == 2);
    const auto g = make_builtin_map("gauss");
    CHECK(g.branch_index(0.5) == 0);
    CHECK(g.branch_index(1.0 / 4.0) == 2);
  }

  TEST_CASE("iterate examples") {
    CHECK(iterate(make_builtin_map("tripling"), 0.2, 1) == doctest::Approx(0.6));
    CHECK(iterate(make_builtin_map("rotation", std::vector<double>{0.25}), 0.0, 4) == 0.0);
    long double x = 0.3L;
    for (int i = 0; i < 2; ++i) x = 4.0L * x * (1.0L - x);
    const double got = iterate(make_builtin_map("logistic", std::vector<double>{4.0}), 0.3, 2);
    CHECK(got == doctest::Approx(static_cast<double>(x)).epsilon(1e-14));
  }

  TEST_CASE("floating iteration composes exactly") {
    Rng rng(3);
    for (const auto& m : all_maps()) {
      if (m.orbit_mode() != OrbitMode::floating) continue;
      for (int t = 0; t < 20; ++t) {
        const double x = 0.05 + 0.9 * rng.uniform();
        CHECK(iterate(m, x, 13) == iterate(m, iterate(m, x, 5), 8));
      }
    }
  }

  TEST_CASE("symbolic orbits follow the map within one window ulp") {
    for (const char* name : {"doubling", "tent"}) {
      const auto m = make_builtin_map(name);
      CHECK_THROWS_AS(OrbitCursor(m, 0.3), OrbitModeError);
      CHECK_THROWS_AS(generate_orbit(m, 0.3, 5), OrbitModeError);
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Orbit o = generate_symbolic_orbit(m, seed, 2000);
        CHECK(o.points[0] == sample_initial_point(m, seed));
        CHECK(o.mode == OrbitMode::symbolic_exact);
        for (std::size_t k = 0; k + 1 < o.length(); ++k) {
          REQUIRE(std::abs(m(o.points[k]) - o.points[k + 1]) <= 0x1.0p-52);
        }
      }
    }
  }

  TEST_CASE("symbolic doubling orbits do not collapse") {
    const auto m = make_builtin_map("doubling");
    const Orbit o = generate_symbolic_orbit(m, 9, 100000);
    std::size_t ones = 0;
    for (double p : o.points) ones += p >= 0.5 ? 1 : 0;
    CHECK(ones / 100000.0 == doctest::Approx(0.5).epsilon(0.02));
  }

  TEST_CASE("derivatives match central differences") {
    Rng rng(5);
    for (const auto& m : all_maps()) {
      const std::size_t branches = std::min<std::size_t>(m.branch_count(), 40);
      for (int i = 0; i < 100; ++i) {
        const std::size_t k = rng.bits() % branches;
        const Interval d = m.branch_domain(k);
        const double h = 1e-7;
        const double x = d.lo + (d.hi - d.lo) * (0.1 + 0.8 * rng.uniform());
        if (x - h <= d.lo || x + h >= d.hi) continue;
        const double fd = (m.eval(k, x + h) - m.eval(k, x - h)) / (2 * h);
        const double exact = m.derivative(k, x);
        // Logistic derivative vanishes at 1/2; compare absolutely there.
        const double scale = std::max(std::abs(exact), 1.0);
        CHECK(std::abs(fd - exact) / scale < 1e-5);
        CHECK((exact > 0) == (m.branch_direction(k) == Monotone::increasing));
      }
    }
  }

  TEST_CASE("image_of_union examples") {
    const auto tri = make_builtin_map("tripling");
    const auto a = image_of_union(tri, IntervalUnion{{0.0, 0.1}});
    REQUIRE(a.size() == 1);
    CHECK(a.intervals()[0].lo == 0.0);
    CHECK(a.intervals()[0].hi == doctest::Approx(0.3));

    const auto b = image_of_union(tri, IntervalUnion{{0.3, 0.4}});
    REQUIRE(b.size() == 2);
    CHECK(b.intervals()[0].lo == doctest::Approx(0.0));
    CHECK(b.intervals()[0].hi == doctest::Approx(0.2));
    CHECK(b.intervals()[1].lo == doctest::Approx(0.9));
    CHECK(b.intervals()[1].hi == doctest::Approx(1.0));

    const auto rot = make_builtin_map("rotation", std::vector<double>{0.25});
    const auto c = image_of_union(rot, IntervalUnion{{0.9, 0.95}});
    REQUIRE(c.size() == 1);
    CHECK(c.intervals()[0].lo == doctest::Approx(0.15));
    CHECK(c.intervals()[0].hi == doctest::Approx(0.2));
  }

  TEST_CASE("image_of_union matches dense sampling and never shrinks expanding pieces") {
    Rng rng(8);
    for (const auto& m : all_maps()) {
      for (int t = 0; t < 40; ++t) {
        const double lo = 0.01 + 0.9 * rng.uniform();
        const double hi = std::min(1.0, lo + 0.08 * rng.uniform() + 1e-4);
        const IntervalUnion u{{lo, hi}};
        IntervalUnion image;
        try {
          image = image_of_union(m, u);
        } catch (const BranchTruncationError&) {
          continue;
        }
        double previous = -1.0;
        for (const auto& iv : image.intervals()) {
          CHECK(iv.lo > previous);
          previous = iv.hi;
        }
        // Every sampled image point lies in the computed image.
        for (int s = 0; s <= 1000; ++s) {
          const double x = lo + (hi - lo) * s / 1000.0;
          const double y = m(x);
          bool inside = false;
          for (const auto& iv : image.intervals()) inside = inside || (y >= iv.lo - 1e-12 && y <= iv.hi + 1e-12);
          REQUIRE(inside);
        }
        // Every computed piece is hit by the samples (no phantom mass).
        for (const auto& iv : image.intervals()) {
          if (iv.length() < 1e-3) continue;
          bool hit = false;
          for (int s = 0; s <= 20000 && !hit; ++s) {
            const double y = m(lo + (hi - lo) * s / 20000.0);
            hit = y >= iv.lo && y <= iv.hi;
          }
          CHECK(hit);
        }
        if (m.min_abs_slope() >= 1.0 && m.branch_index(lo) == m.branch_index(hi) &&
            m.family() != MapFamily::gauss) {
          CHECK(image.total_length() >= u.total_length() - 1e-15);
        }
      }
    }
  }

  TEST_CASE("log_derivative_sum examples") {
    Rng rng(4);
    const auto tri = make_builtin_map("tripling");
    CHECK(log_derivative_sum(tri, rng.uniform(), 10) == doctest::Approx(10 * std::log(3.0)));
    const auto rot = make_builtin_map("rotation", std::vector<double>{0.3});
    CHECK(log_derivative_sum(rot, rng.uniform(), 50) == 0.0);
    // Independent oracle: iterate and sum in long double.
    long double x = 0.3L;
    long double sum = 0.0L;
    for (int i = 0; i < 5; ++i) {
      sum += std::log(std::abs(4.0L - 8.0L * x));
      x = 4.0L * x * (1.0L - x);
    }
    const auto logi = make_builtin_map("logistic", std::vector<double>{4.0});
    CHECK(log_derivative_sum(logi, 0.3, 5) == doctest::Approx(static_cast<double>(sum)).epsilon(1e-12));
    CHECK(log_derivative_sum(logi, 0.3, 5) == doctest::Approx(2.98451232784785).epsilon(1e-12));
    CHECK_THROWS_AS(log_derivative_sum(logi, 0.5, 3), CriticalPointError);
  }

  TEST_CASE("Birkhoff average of logistic(4) is within 1% of log 2") {
    const auto logi = make_builtin_map("logistic", std::vector<double>{4.0});
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      total += log_derivative_sum(logi, sample_initial_point(logi, seed), 1'000'000) / 1e6;
    }
    CHECK(total / 4 == doctest::Approx(std::log(2.0)).epsilon(0.01));
  }

  TEST_CASE("samplers match their invariant densities") {
    const auto logi = make_builtin_map("logistic", std::vector<double>{4.0});
    const auto gauss = make_builtin_map("gauss");
    const auto tri = make_builtin_map("tripling");
    std::vector<double> a;
    std::vector<double> g;
    std::vector<double> u;
    for (std::uint64_t seed = 0; seed < 4000; ++seed) {
      a.push_back(sample_initial_point(logi, seed));
      g.push_back(sample_initial_point(gauss, seed));
      u.push_back(sample_initial_point(tri, seed));
    }
    // 1% critical value of the one-sample KS statistic.
    const double critical = 1.63 / std::sqrt(4000.0);
    CHECK(ks_distance(a, arcsine_cdf) < critical);
    CHECK(ks_distance(g, gauss_cdf) < critical);
    CHECK(ks_distance(u, [](double x) { return x; }) < critical);
    CHECK(sample_initial_point(logi, 7) == sample_initial_point(logi, 7));
  }

  TEST_CASE("long orbits equidistribute to the invariant densities") {
    // Orbit samples are correlated; use a thinned orbit and a loose bound.
    const auto logi = make_builtin_map("logistic", std::vector<double>{4.0});
    const auto gauss = make_builtin_map("gauss", std::vector<double>{1e9});
    const Orbit lo = generate_typical_orbit(logi, 1, 200000);
    const Orbit go = generate_typical_orbit(gauss, 1, 200000);
    std::vector<double> a;
    std::vector<double> g;
    for (std::size_t i = 0; i < lo.length(); i += 20) {
      a.push_back(lo.points[i]);
      g.push_back(go.points[i]);
    }
    CHECK(ks_distance(a, arcsine_cdf) < 0.03);
    CHECK(ks_distance(g, gauss_cdf) < 0.03);
  }

  TEST_CASE("maps without a sampler refuse to sample") {
    const auto m = make_builtin_map("logistic", std::vector<double>{3.7});
    CHECK(m.invariant_measure_id().empty());
    CHECK_THROWS_AS(sample_initial_point(m, 1), NoSamplerError);
  }

  TEST_CASE("rotation distance is the circle metric") {
    const auto m = make_builtin_map("rotation", std::vector<double>{0.25});
    CHECK(m.distance(0.95, 0.05) == doctest::Approx(0.1));
    CHECK(make_builtin_map("tripling").distance(0.95, 0.05) == doctest::Approx(0.9));
  }
}
