#pragma once

#include <functional>
#include <span>
#include <vector>

#include "rhoest/density.hpp"

namespace rhoest {

enum class Direction { nonincreasing, nondecreasing };

// Monotone function on (a, b). The evaluator is also called at a and b, where
// it must return the one-sided limits f(a+) and f(b-) (possibly infinite).
struct MonotonePiece {
  double a = 0.0;
  double b = 1.0;
  Direction direction = Direction::nonincreasing;
  std::function<double(double)> f;
};

// Throws ShapeViolation when f is not monotone in the declared direction on a
// 1000-point probe grid, InvalidArgument on a bad interval.
void check_monotone(const MonotonePiece& p);

// sup f - inf f over (a, b), from the endpoint limits.
double variation(const MonotonePiece& p);

struct FunctionalReport {
  int order = 0; // 0 for the sqrt-variation functional, 1 for its derivative form
  std::vector<double> lengths;
  std::vector<double> variations;
  std::vector<double> terms; // (l V^2)^(1/3) or (l^3 V^2)^(1/5), with inf * 0 = 0
  double value = 0.0;        // (sum terms)^3 or (sum terms)^5
};

// Term aggregation shared by all functional overloads.
FunctionalReport aggregate_functional(std::vector<double> lengths, std::vector<double> variations,
                                      int order);

// Functional over consecutive pieces. For order 0 each piece carries sqrt(t);
// for order 1 each carries the derivative of sqrt(t). t is taken to vanish on
// the two unbounded outer intervals.
FunctionalReport functional(std::span<const MonotonePiece> pieces, int order);

// Functional of a piecewise density over the given partition. The two
// unbounded intervals contribute 0 when t vanishes there and +inf otherwise.
FunctionalReport functional(const PiecewiseDensity& t, const Partition& partition, int order);

struct DebaseResult {
  Partition partition;        // endpoints a = x_0 < ... < x_m = b
  std::vector<double> means;  // mean of f on each (x_{j-1}, x_j]
  Partition refined;          // each cell cut into equal parts of length <= (b - a) / D
  double R = 0.0;             // threshold actually used
};

// Piecewise-constant mean approximation with cells on which f drops by at
// most R / D. R must exceed the variation; R equal to the variation is bumped
// to (1 + 1e-6) times it.
DebaseResult debase_approx(const MonotonePiece& p, double R, int D);

// Concave or convex function on [a, b] with its derivative (one-sided at the
// ends).
struct CurvedPiece {
  double a = 0.0;
  double b = 1.0;
  bool concave = true;
  std::function<double(double)> f;
  std::function<double(double)> df;
};

void check_curvature(const CurvedPiece& p);

struct ChordResult {
  double slope = 0.0;
  double intercept = 0.0; // g(x) = intercept + slope x
  double bound = 0.0;     // (b - a) / 4 * |f'(a+) - f'(b-)|
  double sup_error = 0.0; // max |f - g| on a 1001-point probe grid
};

ChordResult chord_approx(const CurvedPiece& p);

struct Allocation {
  std::vector<int> pieces;
  bool degenerate = false; // all weights were zero
};

// D_j = ceil(D w_j / sum w) (at least 1) with w_j = (l_j R_j^2)^(1/3) for
// order 0 and (l_j^3 R_j^2)^(1/5) for order 1.
Allocation allocate_pieces(std::span<const double> lengths, std::span<const double> variations,
                           int D, int order);

struct ApproxResult {
  PiecewiseDensity density;
  Allocation allocation;
  FunctionalReport functional;
  double bound = 0.0;       // stated bound on h^2(t, density)
  std::size_t pieces = 0;   // non-zero segments of the approximant
};

// Histogram approximation from consecutive pieces on which sqrt(t) is monotone
// (t vanishes outside). bound = min(M / (4 D^2), 1).
ApproxResult histogram_approx(std::span<const MonotonePiece> sqrt_pieces, int D);

// Piecewise affine sqrt(t) approximation from consecutive pieces on which
// sqrt(t) is convex or concave. bound = 16 M_1 / D^4.
ApproxResult affine_approx(std::span<const CurvedPiece> sqrt_pieces, int D);

// Sharper bound M_1 / (16 D^4) that the chord construction actually attains.
double affine_construction_bound(const FunctionalReport& m1, int D);

// Reference shapes.
// t(x) = 2(1 - x) on (0, 1).
FunctionDensity triangular_density();
std::vector<MonotonePiece> triangular_sqrt_pieces();
// sqrt(t(x)) = c (1 - x^2) on (-1, 1), c^2 = 15/16.
FunctionDensity concave_parabola_density();
std::vector<CurvedPiece> concave_parabola_sqrt_pieces();

} // namespace rhoest
