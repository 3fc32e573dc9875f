#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rhoest/density.hpp"
#include "rhoest/rho.hpp"

namespace rhoest {

enum class ModelKind { histogram, piecewise_monotone, piecewise_convex_concave, log_concave };

// Declarative description of a density model.
//  - histogram(D): piecewise constant with at most D pieces, zero outside.
//  - piecewise_monotone(k): k monotone pieces including the two zero tails.
//    k = 2 is read as the non-increasing model (zero to the left of the
//    support, non-increasing on it).
//  - piecewise_convex_concave(k): sqrt(t) convex or concave on each of the
//    k - 2 bounded pieces, zero tails; candidates have affine sqrt pieces.
//  - log_concave: 1_I exp(g) with g concave and piecewise affine.
struct ShapeModel {
  ModelKind kind = ModelKind::histogram;
  int param = 1; // D for histogram, k for the piecewise models

  static ShapeModel histogram(int D);
  static ShapeModel piecewise_monotone(int k);
  static ShapeModel piecewise_convex_concave(int k);
  static ShapeModel log_concave();

  void validate() const;
  std::string name() const;
  bool operator==(const ShapeModel&) const = default;
};

struct CandidateSet {
  ShapeModel model;
  std::vector<PiecewiseDensity> densities;
  std::vector<std::string> provenance; // one tag per density

  std::size_t size() const { return densities.size(); }
};

// Deterministic in (sample, model, budget, seed); at most `budget` candidates,
// each of unit mass and satisfying the model's shape constraint.
CandidateSet build_candidates(const Sample& s, const ShapeModel& m, std::size_t budget,
                              std::uint64_t seed);

// Shape validator, written independently of the generators. On failure the
// reason is stored in `why` when given.
bool satisfies_shape(const PiecewiseDensity& d, const ShapeModel& m, std::string* why = nullptr);

// Upper bound on the extremal degree of a V(D)-type point inside model m.
int extremal_degree(const ShapeModel& m, int D);

// max(log x, 1)
double log_plus(double x);
// (d / n) log_+^3(n / d); no universal constant applied.
double rate_bound(double d, double n);

// Weighted least-squares projection onto non-increasing sequences
// (pool-adjacent-violators).
std::vector<double> pav_nonincreasing(std::span<const double> values,
                                      std::span<const double> weights);
std::vector<double> pav_nondecreasing(std::span<const double> values,
                                      std::span<const double> weights);

inline RhoResult rho_estimate(const Sample& s, const CandidateSet& set, const RhoConfig& cfg = {}) {
  return rho_estimate(s, std::span<const PiecewiseDensity>(set.densities), cfg);
}

} // namespace rhoest
