#include <doctest.h>

#include <cmath>
#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "rhoest/approx.hpp"
#include "rhoest/bench.hpp"
#include "rhoest/error.hpp"

using namespace rhoest;

namespace {

using gen::random_piece;
using gen::uni;

double l2_sq(const std::function<double(double)>& f, double a, double b) {
  return oracle::cellwise_integral([&](double x) { return f(x) * f(x); }, {a, b}, 200000);
}

} // namespace

TEST_SUITE("approx") {

TEST_CASE("variation examples") {
  CHECK(variation({0, 1, Direction::nonincreasing, [](double) { return 2.0; }}) == 0.0);
  const double r3 = std::sqrt(3.0);
  CHECK(variation({0, 1, Direction::nonincreasing, [=](double x) { return r3 * (1 - x); }}) ==
        doctest::Approx(r3).epsilon(1e-15));
  CHECK(std::isinf(
      variation({0, 1, Direction::nonincreasing, [](double x) { return 1.0 / std::sqrt(x); }})));
}

TEST_CASE("monotonicity declarations are enforced") {
  MonotonePiece wrong{0, 1, Direction::nondecreasing, [](double x) { return 1 - x; }};
  CHECK_THROWS_AS(check_monotone(wrong), ShapeViolation);
  CHECK_THROWS_AS(variation(wrong), ShapeViolation);
  CurvedPiece convex_as_concave{0, 1, true, [](double x) { return x * x; },
                                [](double x) { return 2 * x; }};
  CHECK_THROWS_AS(check_curvature(convex_as_concave), ShapeViolation);
}

TEST_CASE("functional examples") {
  const double r3 = std::sqrt(3.0);
  PiecewiseDensity t(Partition({0.0, 1.0}), {Constant{0.0}, SqrtAffine{r3, -r3}, Constant{0.0}});
  CHECK(functional(t, Partition({0.0, 1.0}), 0).value == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(functional(triangular_sqrt_pieces(), 0).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(functional(t, Partition({0.0, 1.0}), 1).value == 0.0);
  // sqrt(t) piecewise affine with a kink: order 1 still vanishes cell by cell
  PiecewiseDensity tent(Partition({0.0, 1.0, 2.0}),
                        {Constant{0.0}, SqrtAffine{0.0, 1.0}, SqrtAffine{2.0, -1.0}, Constant{0.0}});
  CHECK(functional(tent, Partition({0.0, 1.0, 2.0}), 1).value == 0.0);
  CHECK_THROWS_AS(functional(tent, Partition({0.0, 2.0}), 0), ShapeViolation);
}

TEST_CASE("functional is infinite when mass sits on an unbounded cell") {
  PiecewiseDensity e(Partition({0.0}), {Constant{0.0}, ExpAffine{0.0, -1.0}});
  CHECK(std::isinf(functional(e, Partition({0.0}), 0).value));
  auto u = uniform_density(0, 1);
  CHECK(std::isfinite(functional(u, Partition({0.0, 1.0}), 0).value));
}

TEST_CASE("aggregate honours inf times zero") {
  auto r = aggregate_functional({INFINITY, 2.0, INFINITY}, {0.0, 1.0, 0.0}, 0);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-14));
  auto r1 = aggregate_functional({2.0, 3.0}, {1.0, 2.0}, 1);
  double t1 = std::pow(8.0 * 1.0, 0.2), t2 = std::pow(27.0 * 4.0, 0.2);
  CHECK(r1.value == doctest::Approx(std::pow(t1 + t2, 5.0)).epsilon(1e-13));
  double sum = 0.0;
  for (double x : r1.terms) sum += x;
  CHECK(r1.value == doctest::Approx(std::pow(sum, 5.0)).epsilon(1e-15));
}

TEST_CASE("functional is invariant under translation and scaling") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    double p = uni(rng, 0.5, 2.0), q = -uni(rng, 0.1, p);
    double lam = std::exp(uni(rng, -2.0, 2.0)), tau = uni(rng, -5.0, 5.0);
    // sqrt(t) = p + q x on (0, 1), then lam^{-1} t((x - tau) / lam)
    PiecewiseDensity t(Partition({0.0, 1.0}), {Constant{0.0}, SqrtAffine{p, q}, Constant{0.0}});
    double s = 1.0 / std::sqrt(lam);
    PiecewiseDensity u(Partition({tau, tau + lam}),
                       {Constant{0.0}, SqrtAffine{s * (p - q * tau / lam), s * q / lam}, Constant{0.0}});
    double a = functional(t, Partition({0.0, 1.0}), 0).value;
    double b = functional(u, Partition({tau, tau + lam}), 0).value;
    CHECK(std::fabs(a - b) <= 1e-9 * std::max(1.0, a));
  }
}

TEST_CASE("functional does not increase under refinement") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    MonotonePiece p = random_piece(rng);
    std::vector<MonotonePiece> one{p}, split;
    double cut = uni(rng, p.a, p.b);
    split.push_back({p.a, cut, p.direction, p.f});
    split.push_back({cut, p.b, p.direction, p.f});
    for (int order : {0, 1}) {
      double coarse = functional(one, order).value, fine = functional(split, order).value;
      CHECK(fine <= coarse + 1e-9);
    }
  }
}

TEST_CASE("debase example") {
  MonotonePiece p{0, 1, Direction::nonincreasing, [](double x) { return 1 - x; }};
  DebaseResult r = debase_approx(p, 1.01, 2);
  REQUIRE(r.partition.endpoint_count() == 3);
  CHECK(r.partition.endpoints()[1] == doctest::Approx(0.505).epsilon(1e-10));
  double l1 = 0.505, l2 = 0.495;
  double err = std::sqrt((l1 * l1 * l1 + l2 * l2 * l2) / 12.0);
  CHECK(err == doctest::Approx(0.1444).epsilon(1e-3));
  double measured = std::sqrt(oracle::cellwise_integral(
      [&](double x) {
        double m = x <= r.partition.endpoints()[1] ? r.means[0] : r.means[1];
        return (p.f(x) - m) * (p.f(x) - m);
      },
      {0.0, r.partition.endpoints()[1], 1.0}, 100000));
  CHECK(measured == doctest::Approx(err).epsilon(1e-6));
  CHECK(measured <= 1.01 / 4.0);
}

TEST_CASE("debase on constants, increasing pieces and bad input") {
  MonotonePiece c{0, 3, Direction::nonincreasing, [](double) { return 2.0; }};
  auto r = debase_approx(c, 1.0, 5);
  CHECK(r.means.size() == 1);
  CHECK(r.means[0] == doctest::Approx(2.0));
  MonotonePiece up{0, 1, Direction::nondecreasing, [](double x) { return x; }};
  auto ru = debase_approx(up, 1.01, 2);
  CHECK(ru.partition.endpoints()[1] == doctest::Approx(0.505).epsilon(1e-10));
  CHECK(ru.means[0] < ru.means[1]);
  CHECK_THROWS_AS(debase_approx(up, 0.5, 2), InvalidArgument);
  CHECK(debase_approx(up, 1.0, 2).R > 1.0);
  CHECK_THROWS_AS(debase_approx({0, INFINITY, Direction::nonincreasing, [](double) { return 0.0; }},
                                1.0, 2),
                  InvalidArgument);
}

TEST_CASE("optimal constant of the mean approximation") {
  for (double R : {0.5, 1.0, 3.0})
    for (double l : {0.5, 1.0, 4.0}) {
      MonotonePiece step{0, l, Direction::nonincreasing,
                         [=](double x) { return x <= l / 2 ? R / 2 : -R / 2; }};
      auto r = debase_approx(step, R * 1.5, 1);
      CHECK(std::fabs(r.means[0]) <= 1e-9 * R);
      double err = oracle::cellwise_integral(
          [&](double x) { return (step.f(x) - r.means[0]) * (step.f(x) - r.means[0]); },
          {0.0, l / 2, l}, 1000);
      CHECK(err == doctest::Approx(l * R * R / 4).epsilon(1e-9));
    }
}

TEST_CASE("debase structure on random monotone pieces") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    MonotonePiece p = random_piece(rng);
    int D = 1 + static_cast<int>(rng() % 12);
    double V = std::fabs(p.f(p.b) - p.f(p.a));
    double R = V * uni(rng, 1.0001, 1.5);
    auto r = debase_approx(p, R, D);
    auto e = r.partition.endpoints();
    CHECK(r.means.size() + 1 == e.size());
    CHECK(r.means.size() <= static_cast<std::size_t>(D));
    CHECK(e.front() == p.a);
    CHECK(e.back() == p.b);
    auto fe = r.refined.endpoints();
    CHECK(fe.size() - 1 <= static_cast<std::size_t>(2 * D));
    for (std::size_t i = 0; i + 1 < fe.size(); ++i) {
      CHECK(fe[i + 1] - fe[i] <= (p.b - p.a) / D * (1 + 1e-12));
      CHECK(std::fabs(p.f(fe[i + 1]) - p.f(fe[i])) <= R / D * (1 + 1e-9));
    }
    CHECK(r.refined.refines(r.partition));

    auto approx = [&](double x) {
      std::size_t c = std::min<std::size_t>(r.partition.locate(x) - 1, r.means.size() - 1);
      return r.means[c];
    };
    double total = 0.0, err = 0.0;
    for (std::size_t c = 0; c < r.means.size(); ++c) {
      double mean = oracle::cellwise_integral(p.f, {e[c], e[c + 1]}, 20000) / (e[c + 1] - e[c]);
      CHECK(std::fabs(mean - r.means[c]) <= 1e-6 * (1 + std::fabs(mean)));
      total += r.means[c] * (e[c + 1] - e[c]);
    }
    double full = oracle::cellwise_integral(p.f, {p.a, p.b}, 200000);
    CHECK(std::fabs(total - full) <= 1e-6 * (1 + std::fabs(full)));
    double norm_f = l2_sq(p.f, p.a, p.b), norm_a = 0.0;
    for (std::size_t c = 0; c < r.means.size(); ++c)
      norm_a += r.means[c] * r.means[c] * (e[c + 1] - e[c]);
    CHECK(norm_a <= norm_f * (1 + 1e-6) + 1e-12);
    std::vector<double> knots(e.begin(), e.end());
    err = oracle::cellwise_integral([&](double x) { return (p.f(x) - approx(x)) * (p.f(x) - approx(x)); },
                                    knots, 4000);
    CHECK(std::sqrt(err) <= R * std::sqrt(p.b - p.a) / (2.0 * D) * (1 + 1e-6));
  }
}

TEST_CASE("chord examples") {
  CurvedPiece aff{0, 2, true, [](double x) { return 1 + 2 * x; }, [](double) { return 2.0; }};
  auto c0 = chord_approx(aff);
  CHECK(c0.slope == doctest::Approx(2.0));
  CHECK(c0.intercept == doctest::Approx(1.0));
  CHECK(c0.sup_error <= 1e-14);
  CHECK(c0.bound == 0.0);

  CurvedPiece tent{-1, 1, true, [](double x) { return 1 - std::fabs(x); },
                   [](double x) { return x < 0 ? 1.0 : -1.0; }};
  auto c1 = chord_approx(tent);
  CHECK(c1.slope == 0.0);
  CHECK(c1.intercept == 0.0);
  CHECK(c1.sup_error == doctest::Approx(1.0));
  CHECK(c1.bound == doctest::Approx(1.0));

  CurvedPiece sq{0, 1, false, [](double x) { return x * x; }, [](double x) { return 2 * x; }};
  auto c2 = chord_approx(sq);
  CHECK(c2.slope == doctest::Approx(1.0));
  CHECK(c2.sup_error == doctest::Approx(0.25));
  CHECK(c2.bound == doctest::Approx(0.5));
}

TEST_CASE("allocation examples") {
  std::vector<double> l{1.0, 1.0}, v{1.0, 1.0};
  CHECK(allocate_pieces(l, v, 4, 0).pieces == std::vector<int>{2, 2});
  std::vector<double> l2{1.0, 8.0}, v2{1.0, 1.0};
  CHECK(allocate_pieces(l2, v2, 3, 0).pieces == std::vector<int>{1, 2});
  std::vector<double> z{0.0, 0.0};
  auto d = allocate_pieces(l, z, 5, 0);
  CHECK(d.degenerate);
  CHECK(d.pieces == std::vector<int>{1, 1});
}

TEST_CASE("allocation never exceeds D + k") {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t k = 1 + rng() % 8;
    std::vector<double> l(k), v(k);
    for (std::size_t j = 0; j < k; ++j) {
      l[j] = uni(rng, 0.01, 10.0);
      v[j] = rng() % 5 == 0 ? 0.0 : uni(rng, 0.0, 5.0);
    }
    int D = 1 + static_cast<int>(rng() % 40);
    for (int order : {0, 1}) {
      auto a = allocate_pieces(l, v, D, order);
      int sum = 0;
      for (int x : a.pieces) {
        CHECK(x >= 1);
        sum += x;
      }
      CHECK(sum <= D + static_cast<int>(k));
    }
  }
}

TEST_CASE("histogram approximation of a uniform is exact") {
  std::vector<MonotonePiece> flat{{0, 2, Direction::nonincreasing,
                                   [](double) { return std::sqrt(0.5); }}};
  for (int D : {1, 3, 8}) {
    auto r = histogram_approx(flat, D);
    CHECK(hellinger2(r.density, uniform_density(0, 2)) <= 1e-14);
  }
}

TEST_CASE("histogram approximation of the triangular density") {
  auto r = histogram_approx(triangular_sqrt_pieces(), 4);
  CHECK(r.bound == doctest::Approx(0.03125));
  double measured = oracle::fine_h2(triangular_density().pdf, r.density, 0.0, 1.0, 20000);
  CHECK(measured <= 0.03125);
  CHECK(r.pieces <= 4 + 1);
}

TEST_CASE("piecewise histogram approximation stays in V(D + k)") {
  // sqrt(t) rises then falls: two monotone pieces, tent shape
  double z = std::sqrt(2.0 / 3.0);
  std::vector<MonotonePiece> tent{
      {0, 1, Direction::nondecreasing, [=](double x) { return x / z; }},
      {1, 2, Direction::nonincreasing, [=](double x) { return (2 - x) / z; }}};
  auto pdf = [=](double x) { return x < 0 || x > 2 ? 0.0 : (1 - std::fabs(x - 1)) * (1 - std::fabs(x - 1)) / (z * z); };
  for (int D : {1, 2, 4, 8, 16}) {
    auto r = histogram_approx(tent, D);
    CHECK(r.pieces <= static_cast<std::size_t>(D + 2));
    CHECK(oracle::fine_h2(pdf, r.density, 0.0, 2.0, 20000) <= r.bound + 1e-9);
  }
}

TEST_CASE("histogram bound on random monotone instances") {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 20; ++trial) {
    MonotoneInstance inst = random_monotone_instance(rng);
    double a = inst.sqrt_pieces.front().a, b = inst.sqrt_pieces.back().b;
    for (int D : {1, 2, 4, 8, 16}) {
      auto r = histogram_approx(inst.sqrt_pieces, D);
      double measured = oracle::fine_h2(inst.density.pdf, r.density, a, b, 4000);
      CHECK(measured <= std::min(r.functional.value / (4.0 * D * D), 1.0) + 1e-9);
    }
  }
}

TEST_CASE("affine approximation is exact on affine roots") {
  double z = std::sqrt(2.0 / 3.0);
  std::vector<CurvedPiece> tent{
      {0, 1, true, [=](double x) { return x / z; }, [=](double) { return 1 / z; }},
      {1, 2, true, [=](double x) { return (2 - x) / z; }, [=](double) { return -1 / z; }}};
  auto pdf = [=](double x) { return x < 0 || x > 2 ? 0.0 : (1 - std::fabs(x - 1)) * (1 - std::fabs(x - 1)) / (z * z); };
  auto r = affine_approx(tent, 3);
  CHECK(r.functional.value == 0.0);
  CHECK(oracle::fine_h2(pdf, r.density, 0.0, 2.0, 20000) <= 1e-9);
}

TEST_CASE("affine approximation of the concave parabola") {
  for (int D : {1, 2, 4, 8}) {
    auto r = affine_approx(concave_parabola_sqrt_pieces(), D);
    double measured = oracle::fine_h2(concave_parabola_density().pdf, r.density, -1.0, 1.0, 20000);
    CHECK(measured <= r.bound + 1e-9);
    CHECK(r.pieces <= static_cast<std::size_t>(2 * (D + 1)));
  }
}

TEST_CASE("affine bound on random curved instances") {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 20; ++trial) {
    CurvedInstance inst = random_curved_instance(rng);
    double a = inst.sqrt_pieces.front().a, b = inst.sqrt_pieces.back().b;
    for (int D : {1, 2, 4, 8, 16}) {
      auto r = affine_approx(inst.sqrt_pieces, D);
      double measured = oracle::fine_h2(inst.density.pdf, r.density, a, b, 2000);
      CHECK(measured <= 16.0 * r.functional.value / std::pow(D, 4.0) + 1e-9);
      CHECK(r.pieces <= static_cast<std::size_t>(2 * (D + 1)));
    }
  }
}

} // TEST_SUITE
