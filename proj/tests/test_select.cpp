#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "rhoest/error.hpp"
#include "rhoest/models.hpp"
#include "rhoest/select.hpp"

using namespace rhoest;

TEST_SUITE("select") {

TEST_CASE("weight masses") {
  const double limit = 2.0 / (std::numbers::e - 1.0);
  CHECK(std::fabs(untruncated_weight_mass() - limit) <= 1e-12);
  CHECK(limit == doctest::Approx(1.16395).epsilon(1e-5));
  auto d = SelectionPlan::default_plan();
  CHECK(d.members.size() == 16);
  CHECK(d.weight_mass() < limit);
  CHECK_NOTHROW(d.validate());
  CHECK_NOTHROW(SelectionPlan::laplace_plan().validate());
  CHECK(SelectionPlan::default_plan(40, 40).weight_mass() <= limit);
}

TEST_CASE("plan validation") {
  SelectionPlan empty;
  CHECK_THROWS_AS(empty.validate(), InvalidArgument);
  SelectionPlan heavy{{{ShapeModel::histogram(1), 0.1}, {ShapeModel::histogram(2), 0.1}}};
  CHECK_THROWS_AS(heavy.validate(), InvalidArgument);
  SelectionPlan negative{{{ShapeModel::histogram(1), -1.0}}};
  CHECK_THROWS_AS(negative.validate(), InvalidArgument);
}

TEST_CASE("sample size requirements") {
  SelectionPlan one{{{ShapeModel::histogram(1), 1.0}}};
  CHECK_THROWS_AS(split_select(Sample({0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}), one, {}, 0),
                  InvalidArgument);
  CHECK_THROWS_AS(split_select(Sample({0.1, 0.2, 0.3, 0.4}), one, {}, 0), InvalidArgument);
  CHECK_NOTHROW(split_select(Sample({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}), one, {}, 0));
}

TEST_CASE("seeded permutation is a permutation") {
  for (std::uint64_t seed : {0u, 1u, 99u}) {
    auto p = seeded_permutation(50, seed);
    std::vector<std::size_t> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < 50; ++i) CHECK(sorted[i] == i);
    CHECK(p == seeded_permutation(50, seed));
  }
}

TEST_CASE("single-member plan returns the first-half estimator") {
  Sample s = sample(uniform_density(0, 1), 60, 4);
  SelectionPlan one{{{ShapeModel::piecewise_monotone(2), 1.0}}};
  auto r = split_select(s, one, {}, 9, 32);
  CHECK(r.report.selected == 0);
  REQUIRE(r.report.fits.size() == 1);

  auto perm = seeded_permutation(60, 9);
  std::vector<double> first;
  for (std::size_t i = 0; i < 30; ++i) first.push_back(s[perm[i]]);
  Sample half(first);
  std::mt19937_64 seeds(9 ^ 0x9e3779b97f4a7c15ULL);
  auto set = build_candidates(half, ShapeModel::piecewise_monotone(2), 32, seeds());
  auto direct = rho_estimate(half, set);
  CHECK(hellinger2(direct.estimate, r.estimate) <= 1e-14);
  CHECK(direct.estimate.partition() == r.estimate.partition());
}

TEST_CASE("selection picks the hold-out minimum and is deterministic") {
  Sample s = sample(laplace_density(), 200, 5);
  auto plan = SelectionPlan::laplace_plan();
  auto a = split_select(s, plan, {}, 3), b = split_select(s, plan, {}, 3);
  CHECK(a.report.selected == b.report.selected);
  CHECK(a.report.holdout_upsilon == b.report.holdout_upsilon);
  CHECK(a.estimate.partition() == b.estimate.partition());
  const auto& u = a.report.holdout_upsilon;
  REQUIRE(u.size() == plan.members.size());
  CHECK(u[a.report.selected] == *std::min_element(u.begin(), u.end()));
  CHECK_FALSE(a.report.method.empty());
}

TEST_CASE("selected risk is close to the best family") {
  auto truth = laplace_density();
  auto plan = SelectionPlan::laplace_plan();
  int good = 0, total = 10;
  for (int rep = 0; rep < total; ++rep) {
    std::size_t n = 200, p = n / 2;
    Sample s = sample(truth, n, 700 + rep);
    auto r = split_select(s, plan, {}, rep);
    // Rebuild every family estimator to find the best single one.
    auto perm = seeded_permutation(n, rep);
    std::vector<double> first;
    for (std::size_t i = 0; i < p; ++i) first.push_back(s[perm[i]]);
    Sample half(first);
    std::mt19937_64 seeds(static_cast<std::uint64_t>(rep) ^ 0x9e3779b97f4a7c15ULL);
    double best = 1.0;
    for (const auto& m : plan.members) {
      auto set = build_candidates(half, m.model, 48, seeds());
      best = std::min(best, hellinger2(truth, rho_estimate(half, set).estimate));
    }
    if (hellinger2(truth, r.estimate) <= 2.0 * best + 25.0 / static_cast<double>(p)) ++good;
  }
  CHECK(good >= 9);
}

TEST_CASE("laplace density") {
  auto l = laplace_density(1.0, 2.0);
  CHECK(l(1.0 + 1e-12) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(l(3.0) == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(l.cdf(1.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(laplace_density(0.0, 0.0), InvalidArgument);
}

} // TEST_SUITE
