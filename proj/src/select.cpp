#include "rhoest/select.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "rhoest/error.hpp"

namespace rhoest {

SelectionPlan SelectionPlan::default_plan(int max_j, int max_k) {
  SelectionPlan p;
  for (int j = 1; j <= max_j; ++j)
    p.members.push_back({ShapeModel::piecewise_monotone(j + 2), static_cast<double>(j)});
  for (int k = 1; k <= max_k; ++k)
    p.members.push_back({ShapeModel::piecewise_convex_concave(k + 2), static_cast<double>(k)});
  return p;
}

SelectionPlan SelectionPlan::laplace_plan() {
  SelectionPlan p;
  p.members.push_back({ShapeModel::histogram(1), 1.0});
  p.members.push_back({ShapeModel::piecewise_monotone(4), 2.0});
  p.members.push_back({ShapeModel::log_concave(), 1.0});
  return p;
}

double SelectionPlan::weight_mass() const {
  double s = 0.0;
  for (const auto& m : members) s += std::exp(-m.weight);
  return s;
}

double untruncated_weight_mass() {
  double sum = 0.0;
  for (int j = 1;; ++j) {
    double term = std::exp(-static_cast<double>(j));
    if (sum + 2.0 * term == sum) break;
    sum += 2.0 * term;
  }
  return sum;
}

void SelectionPlan::validate() const {
  if (members.empty()) throw InvalidArgument("selection plan is empty");
  for (const auto& m : members) {
    m.model.validate();
    if (!(m.weight > 0.0) || !std::isfinite(m.weight))
      throw InvalidArgument("selection plan weights must be positive");
  }
  if (weight_mass() > 2.0 / (std::numbers::e - 1.0) * (1.0 + 1e-12))
    throw InvalidArgument("selection plan weights exceed the 2/(e-1) mass");
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

SelectionResult split_select(const Sample& s, const SelectionPlan& plan, const RhoConfig& cfg,
                             std::uint64_t seed, std::size_t budget) {
  plan.validate();
  const std::size_t n = s.size();
  if (n % 2 != 0) throw InvalidArgument("split_select: sample size must be even");
  if (n < 6) throw InvalidArgument("split_select: sample size must be at least 6");
  const std::size_t p = n / 2;

  auto perm = seeded_permutation(n, seed);
  std::vector<double> first, second;
  for (std::size_t i = 0; i < n; ++i) (i < p ? first : second).push_back(s[perm[i]]);
  Sample fit_half(std::move(first)), hold_half(std::move(second));

  std::vector<PiecewiseDensity> estimators;
  SelectionReport report;
  report.method = "rho-selection over the fitted estimators on the held-out half "
                  "(replaces a T-estimator)";
  std::mt19937_64 seeds(seed ^ 0x9e3779b97f4a7c15ULL);
  for (const auto& member : plan.members) {
    CandidateSet set = build_candidates(fit_half, member.model, budget, seeds());
    RhoResult fit = rho_estimate(fit_half, set, cfg);
    FamilyFit ff;
    ff.model = member.model.name();
    ff.candidates = set.size();
    ff.pieces = fit.estimate.nonzero_segments();
    ff.fit_upsilon = fit.diagnostics.upsilon[fit.diagnostics.argmin];
    report.fits.push_back(ff);
    estimators.push_back(std::move(fit.estimate));
  }

  RhoConfig sel = cfg;
  sel.candidate_budget = std::max(cfg.candidate_budget, estimators.size());
  RhoResult chosen = rho_estimate(hold_half, std::span<const PiecewiseDensity>(estimators), sel);
  report.holdout_upsilon = chosen.diagnostics.upsilon;
  report.selected = chosen.diagnostics.argmin;
  return {std::move(estimators[report.selected]), std::move(report)};
}

PiecewiseDensity laplace_density(double mu, double b) {
  if (!(b > 0.0) || !std::isfinite(b) || !std::isfinite(mu))
    throw InvalidArgument("laplace_density: needs finite mu and b > 0");
  double a = -std::log(2.0 * b);
  std::vector<Form> forms{ExpAffine{a - mu / b, 1.0 / b}, ExpAffine{a + mu / b, -1.0 / b}};
  return PiecewiseDensity(Partition({mu}), std::move(forms));
}

} // namespace rhoest
