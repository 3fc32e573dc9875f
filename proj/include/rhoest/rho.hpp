#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rhoest/density.hpp"

namespace rhoest {

struct RhoConfig {
  // Slack defining the near-minimizer set {Upsilon <= min + kappa}.
  double kappa = 35.7;
  QuadratureOptions quadrature{};
  // Largest candidate list accepted by the pairwise pass.
  std::size_t candidate_budget = 256;
  // The pairwise matrix is kept in the diagnostics only up to this size.
  std::size_t matrix_limit = 256;
  // Worker threads for the pairwise pass; 0 means hardware concurrency.
  unsigned threads = 1;
};

struct RhoDiagnostics {
  std::vector<double> upsilon;
  std::size_t argmin = 0;
  std::vector<std::size_t> near_minimizers;
  // Row-major T(X, S[i], S[j]); empty when above RhoConfig::matrix_limit.
  std::vector<double> pairwise;
  std::size_t candidate_count = 0;
};

struct RhoResult {
  PiecewiseDensity estimate;
  RhoDiagnostics diagnostics;
};

// psi(u) = (u - 1) / sqrt(1 + u^2) on [0, +inf), psi(+inf) = 1.
double psi(double u);

// sqrt(t'(x) / t(x)) with 0/0 = 1 and a/0 = +inf.
double sqrt_ratio(const PiecewiseDensity& tprime, const PiecewiseDensity& t, double x);

// T(X, t, t') = n/2 [h^2(t, m) - h^2(t', m)] + 2^{-1/2} sum_i psi(sqrt(t'/t)(X_i))
// with m = (t + t') / 2 and n = |xs|. Accepts any number of observations.
double t_statistic(std::span<const double> xs, const PiecewiseDensity& t,
                   const PiecewiseDensity& tprime, const QuadratureOptions& opts = {});
double t_statistic(const Sample& s, const PiecewiseDensity& t, const PiecewiseDensity& tprime,
                   const QuadratureOptions& opts = {});

// sup over t' in S of T(X, t, t').
double upsilon(const Sample& s, std::span<const PiecewiseDensity> candidates,
               const PiecewiseDensity& t, const QuadratureOptions& opts = {});

// Exact argmin of Upsilon over the candidates (lowest index on ties).
RhoResult rho_estimate(const Sample& s, std::span<const PiecewiseDensity> candidates,
                       const RhoConfig& cfg = {});

} // namespace rhoest
