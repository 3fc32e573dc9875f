#pragma once

// Hand-rolled random instances shared by the unit and acceptance tests.

#include <cmath>
#include <random>

#include "rhoest/approx.hpp"
#include "rhoest/density.hpp"

namespace gen {

inline double uni(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * rhoest::unit_variate(rng());
}

// base + amp * tanh((x - mid) / width) on (a, b); continuous and strictly monotone.
inline rhoest::MonotonePiece random_piece(std::mt19937_64& rng) {
  double a = uni(rng, -2.0, 2.0), b = a + std::exp(uni(rng, -1.0, 1.5));
  double base = uni(rng, -1.0, 1.0), amp = uni(rng, 0.1, 3.0), mid = uni(rng, a, b);
  double width = std::exp(uni(rng, -3.0, 0.5));
  bool up = rng() % 2 == 0;
  double sign = up ? 1.0 : -1.0;
  return {a, b, up ? rhoest::Direction::nondecreasing : rhoest::Direction::nonincreasing,
          [=](double x) { return base + sign * amp * std::tanh((x - mid) / width); }};
}

} // namespace gen
