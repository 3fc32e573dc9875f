#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "rhoest/approx.hpp"

namespace rhoest {

// Function on the line that is monotone on each of k open intervals
// (-inf, x_1), (x_1, x_2), ..., (x_{k-1}, +inf), with explicit values at the
// endpoints. Each piece evaluator is also called at its interval ends
// (including +-inf) and must return the one-sided limits there.
struct PiecewiseMonotoneSpec {
  std::vector<double> endpoints;                      // k - 1 finite, increasing
  std::vector<Direction> directions;                  // k
  std::vector<std::function<double(double)>> pieces;  // k
  std::vector<double> endpoint_values;                // k - 1

  std::size_t piece_count() const { return pieces.size(); }
  void validate() const;
  double operator()(double x) const;
};

struct LevelInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const {
    return (lo < x || (lo_closed && x == lo)) && (x < hi || (hi_closed && x == hi));
  }
};

struct LevelSetResult {
  std::vector<LevelInterval> intervals; // maximal, left to right
  std::size_t count = 0;
};

// Maximal intervals of {f > a}, or of {f <= a} when `above` is false.
LevelSetResult level_set_intervals(const PiecewiseMonotoneSpec& f, double a, bool above = true);

// k + ceil((k - 1) / 2)
std::size_t level_set_bound(std::size_t k);

// Finite class of sets given by a membership predicate.
struct SetClassOracle {
  std::vector<std::size_t> ids;
  std::function<bool(std::size_t id, double x)> contains;
};

// True iff every subset of `points` equals C ∩ points for some member C.
// At most 20 points.
bool brute_shatter(const SetClassOracle& oracle, std::span<const double> points);

// Unions of at most k closed intervals whose ends run over the gaps between
// the sorted points (plus one point beyond each extreme). On these points the
// traces coincide with those of all unions of at most k intervals.
SetClassOracle interval_union_oracle(std::span<const double> points, int k);

// Every subset of the points, one member per bit pattern.
SetClassOracle power_set_oracle(std::span<const double> points);

// Members {x in (lo, hi] : f_i(x) > level_j} for every pair (i, j).
SetClassOracle superlevel_oracle(std::vector<std::function<double(double)>> fs,
                                 std::vector<double> levels, double lo, double hi);

} // namespace rhoest
