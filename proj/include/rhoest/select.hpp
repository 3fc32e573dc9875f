#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rhoest/models.hpp"
#include "rhoest/rho.hpp"

namespace rhoest {

struct FamilyMember {
  ShapeModel model;
  double weight = 1.0; // Delta; the prior mass is exp(-Delta)
};

struct SelectionPlan {
  std::vector<FamilyMember> members;

  // piecewise_monotone(j + 2) with Delta = j for j <= max_j, then
  // piecewise_convex_concave(k + 2) with Delta = k for k <= max_k.
  static SelectionPlan default_plan(int max_j = 8, int max_k = 8);
  // histogram(1), piecewise_monotone(4) and log_concave.
  static SelectionPlan laplace_plan();

  double weight_mass() const; // sum of exp(-Delta)
  // Non-empty, positive weights, weight_mass() <= 2 / (e - 1).
  void validate() const;
};

// 2 sum_{j >= 1} e^{-j}, summed until the terms vanish.
double untruncated_weight_mass();

struct FamilyFit {
  std::string model;
  std::size_t candidates = 0;
  std::size_t pieces = 0;
  double fit_upsilon = 0.0; // Upsilon of the fitted estimator on the first half
};

struct SelectionReport {
  std::vector<FamilyFit> fits;
  std::vector<double> holdout_upsilon; // Upsilon of each estimator on the second half
  std::size_t selected = 0;
  std::string method;
};

struct SelectionResult {
  PiecewiseDensity estimate;
  SelectionReport report;
};

// Splits the sample in two halves by a seeded shuffle, fits one rho-estimate
// per plan member on the first half (at most `budget` candidates each) and
// picks among the fitted estimators by the rho-criterion on the second half.
SelectionResult split_select(const Sample& s, const SelectionPlan& plan, const RhoConfig& cfg,
                             std::uint64_t seed, std::size_t budget = 48);

// Fisher-Yates permutation of 0..n-1 driven by mt19937_64(seed).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

// Laplace density exp(-|x - mu| / b) / (2b).
PiecewiseDensity laplace_density(double mu = 0.0, double b = 1.0);

} // namespace rhoest
