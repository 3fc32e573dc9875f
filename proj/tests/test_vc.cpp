#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rhoest/bench.hpp"
#include "rhoest/error.hpp"
#include "rhoest/vc.hpp"

using namespace rhoest;

namespace {

bool in_any(const LevelSetResult& r, double x) {
  for (const auto& iv : r.intervals)
    if (iv.contains(x)) return true;
  return false;
}

std::vector<double> alternating_points(int m) {
  std::vector<double> p;
  for (int i = 0; i < m; ++i) p.push_back(static_cast<double>(i));
  return p;
}

} // namespace

TEST_SUITE("vc") {

TEST_CASE("level set bound formula") {
  for (std::size_t k = 1; k < 20; ++k)
    CHECK(level_set_bound(k) == k + (k - 1 + 1) / 2);
  CHECK(level_set_bound(1) == 1);
  CHECK(level_set_bound(3) == 4);
  CHECK(level_set_bound(6) == 9);
}

TEST_CASE("single monotone piece gives at most one interval") {
  PiecewiseMonotoneSpec f{{}, {Direction::nonincreasing}, {[](double x) { return -std::atan(x); }}, {}};
  for (double a : {-2.0, -0.5, 0.0, 0.7, 2.0}) {
    CHECK(level_set_intervals(f, a).count <= 1);
    CHECK(level_set_intervals(f, a, false).count <= 1);
  }
  auto r = level_set_intervals(f, 0.0);
  REQUIRE(r.count == 1);
  CHECK(std::isinf(r.intervals[0].lo));
  CHECK(std::fabs(r.intervals[0].hi) <= 1e-9);
}

TEST_CASE("tent level set") {
  PiecewiseMonotoneSpec tent{{0.0},
                             {Direction::nondecreasing, Direction::nonincreasing},
                             {[](double x) { return 1 + x; }, [](double x) { return 1 - x; }},
                             {1.0}};
  auto r = level_set_intervals(tent, 0.5);
  REQUIRE(r.count == 1);
  CHECK(r.intervals[0].lo == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(r.intervals[0].hi == doctest::Approx(0.5).epsilon(1e-9));
  CHECK_FALSE(r.intervals[0].lo_closed);
  CHECK_FALSE(r.intervals[0].hi_closed);
}

TEST_CASE("isolated endpoint becomes a singleton") {
  PiecewiseMonotoneSpec f{{0.0, 1.0},
                          {Direction::nonincreasing, Direction::nondecreasing,
                           Direction::nonincreasing},
                          {[](double x) { return -2.0 - std::atan(x); },
                           [](double x) { return x - 0.5; }, [](double x) { return 2.0 - x; }},
                          {1.0, 2.0}};
  auto r = level_set_intervals(f, 0.0);
  CHECK(r.count == 2);
  CHECK(r.count <= level_set_bound(3));
  REQUIRE(r.intervals.size() == 2);
  CHECK(r.intervals[0].lo == 0.0);
  CHECK(r.intervals[0].hi == 0.0);
  CHECK(r.intervals[0].contains(0.0));
  CHECK(r.intervals[1].lo == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(r.intervals[1].hi == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(oracle::scan_level_count(f, 0.0, true) == 2);
}

TEST_CASE("random specs obey the bound and match the scan oracle") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t k = 1 + rng() % 6;
    PiecewiseMonotoneSpec f = random_monotone_spec(rng, k);
    oracle::LevelScan scan(f);
    for (int i = 0; i < 10; ++i) {
      double a = -2.5 + 5.0 * unit_variate(rng());
      for (bool above : {true, false}) {
        auto r = level_set_intervals(f, a, above);
        CHECK(r.count == r.intervals.size());
        CHECK(r.count <= level_set_bound(k));
        CHECK(r.count == scan.count(a, above));
        for (double x : {-7.0, -3.3, -0.1, 0.0, 0.4, 2.2, 5.5, 30.0}) {
          bool want = above ? f(x) > a : f(x) <= a;
          CHECK(in_any(r, x) == want);
        }
        for (double e : f.endpoints) {
          bool want = above ? f(e) > a : f(e) <= a;
          CHECK(in_any(r, e) == want);
        }
      }
    }
  }
}

TEST_CASE("convex and concave pieces yield at most 3k intervals") {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t k = 1 + rng() % 4;
    // k parabolic pieces on unit cells, each split at its vertex: 2k monotone pieces
    PiecewiseMonotoneSpec f;
    for (std::size_t j = 0; j < k; ++j) {
      double lo = static_cast<double>(j), c = 0.1 + 0.8 * unit_variate(rng());
      double vertex = lo + c, curv = (rng() % 2 ? 1.0 : -1.0) * (0.5 + unit_variate(rng()));
      double base = -1.0 + 2.0 * unit_variate(rng());
      auto g = [=](double x) { return base + curv * (x - vertex) * (x - vertex); };
      if (j > 0) {
        f.endpoints.push_back(lo);
        f.endpoint_values.push_back(-1.0 + 2.0 * unit_variate(rng()));
      }
      f.endpoints.push_back(vertex);
      f.endpoint_values.push_back(base);
      f.pieces.push_back(g);
      f.pieces.push_back(g);
      f.directions.push_back(curv > 0 ? Direction::nonincreasing : Direction::nondecreasing);
      f.directions.push_back(curv > 0 ? Direction::nondecreasing : Direction::nonincreasing);
    }
    for (int i = 0; i < 10; ++i) {
      double a = -1.5 + 3.0 * unit_variate(rng());
      CHECK(level_set_intervals(f, a).count <= 3 * k);
      CHECK(level_set_intervals(f, a, false).count <= 3 * k);
    }
  }
}

TEST_CASE("spec validation") {
  PiecewiseMonotoneSpec bad{{1.0, 0.0},
                            {Direction::nonincreasing, Direction::nonincreasing,
                             Direction::nonincreasing},
                            {[](double) { return 0.0; }, [](double) { return 0.0; },
                             [](double) { return 0.0; }},
                            {0.0, 0.0}};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  PiecewiseMonotoneSpec nan_end{{0.0},
                                {Direction::nonincreasing, Direction::nonincreasing},
                                {[](double) { return 0.0; }, [](double) { return 0.0; }},
                                {NAN}};
  CHECK_THROWS_AS(nan_end.validate(), InvalidArgument);
}

TEST_CASE("shattering examples") {
  std::vector<double> three{1.0, 2.0, 3.0};
  CHECK_FALSE(brute_shatter(interval_union_oracle(three, 1), three));
  std::vector<double> two{1.0, 2.0};
  CHECK(brute_shatter(interval_union_oracle(two, 1), two));
  auto five = alternating_points(5);
  CHECK_FALSE(brute_shatter(interval_union_oracle(five, 2), five));
  for (int m : {0, 1, 7, 12}) {
    auto p = alternating_points(m);
    CHECK(brute_shatter(power_set_oracle(p), p));
  }
  auto many = alternating_points(21);
  CHECK_THROWS_AS(brute_shatter(power_set_oracle(many), many), InvalidArgument);
}

TEST_CASE("unions of k intervals shatter 2k points but not 2k + 1") {
  for (int k : {1, 2, 3}) {
    auto even = alternating_points(2 * k), odd = alternating_points(2 * k + 1);
    CHECK(brute_shatter(interval_union_oracle(even, k), even));
    CHECK_FALSE(brute_shatter(interval_union_oracle(odd, k), odd));
  }
}

TEST_CASE("monotone superlevel sets on a cell never shatter three points") {
  std::mt19937_64 rng(53);
  std::vector<std::function<double(double)>> fs;
  for (int i = 0; i < 30; ++i) {
    double mid = unit_variate(rng()), w = 0.01 + unit_variate(rng());
    fs.push_back([=](double x) { return -std::atan((x - mid) / w); });
  }
  std::vector<double> levels;
  for (int i = -15; i <= 15; ++i) levels.push_back(0.1 * i);
  auto o = superlevel_oracle(fs, levels, 0.0, 1.0);
  std::vector<double> two{0.3, 0.6}, three{0.2, 0.5, 0.8};
  CHECK_FALSE(brute_shatter(o, three));
  CHECK_FALSE(brute_shatter(o, two)); // only prefixes: {0.6} alone is unreachable
}

TEST_CASE("cellwise intervals fail on sum of dimensions plus one") {
  // On each of the cells (0,1] and (1,2] the class traces an interval (dimension 2).
  std::vector<double> pts{0.2, 0.4, 0.6, 1.3, 1.7};
  std::vector<double> cuts{0.0, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0};
  std::vector<std::pair<double, double>> cell0, cell1;
  cell0.emplace_back(0.0, 0.0);
  cell1.emplace_back(1.0, 1.0);
  for (std::size_t i = 0; i < cuts.size(); ++i)
    for (std::size_t j = i + 1; j < cuts.size(); ++j) {
      if (cuts[j] <= 1.0) cell0.emplace_back(cuts[i], cuts[j]);
      if (cuts[i] >= 1.0) cell1.emplace_back(cuts[i], cuts[j]);
    }
  SetClassOracle o;
  for (std::size_t i = 0; i < cell0.size() * cell1.size(); ++i) o.ids.push_back(i);
  o.contains = [&](std::size_t id, double x) {
    auto a = cell0[id / cell1.size()], b = cell1[id % cell1.size()];
    return (x > a.first && x <= a.second) || (x > b.first && x <= b.second);
  };
  CHECK_FALSE(brute_shatter(o, pts));
  std::vector<double> four{0.2, 0.6, 1.3, 1.7};
  CHECK(brute_shatter(o, four));
}

} // TEST_SUITE
