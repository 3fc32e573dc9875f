#include "rhoest/rho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "rhoest/error.hpp"
#include "rhoest/kernels.hpp"

namespace rhoest {
namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double hellinger_part(const PiecewiseDensity& t, const PiecewiseDensity& tprime,
                      const QuadratureOptions& opts) {
  PiecewiseDensity mid = mixture_half(t, tprime);
  return hellinger2(t, mid, opts) - hellinger2(tprime, mid, opts);
}

std::vector<double> sqrt_values(const PiecewiseDensity& d, std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    out[i] = std::sqrt(d(xs[i]));
  return out;
}

} // namespace

double psi(double u) {
  if (std::isnan(u) || u < 0.0)
    throw InvalidArgument("psi is defined on [0, +inf]");
  if (std::isinf(u))
    return 1.0;
  return (u - 1.0) / std::hypot(1.0, u);
}

double sqrt_ratio(const PiecewiseDensity& tprime, const PiecewiseDensity& t, double x) {
  double num = tprime(x);
  double den = t(x);
  if (den == 0.0)
    return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

double t_statistic(std::span<const double> xs, const PiecewiseDensity& t,
                   const PiecewiseDensity& tprime, const QuadratureOptions& opts) {
  double n = static_cast<double>(xs.size());
  double score = 0.0;
  for (double x : xs)
    score += psi(sqrt_ratio(tprime, t, x));
  return 0.5 * n * hellinger_part(t, tprime, opts) + kInvSqrt2 * score;
}

double t_statistic(const Sample& s, const PiecewiseDensity& t, const PiecewiseDensity& tprime,
                   const QuadratureOptions& opts) {
  return t_statistic(s.values(), t, tprime, opts);
}

double upsilon(const Sample& s, std::span<const PiecewiseDensity> candidates,
               const PiecewiseDensity& t, const QuadratureOptions& opts) {
  if (candidates.empty())
    throw InvalidArgument("upsilon needs a non-empty candidate set");
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& c : candidates)
    best = std::max(best, t_statistic(s, t, c, opts));
  return best;
}

RhoResult rho_estimate(const Sample& s, std::span<const PiecewiseDensity> candidates,
                       const RhoConfig& cfg) {
  const std::size_t m = candidates.size();
  if (m == 0)
    throw InvalidArgument("rho_estimate needs a non-empty candidate set");
  if (!(cfg.kappa > 0.0))
    throw InvalidArgument("kappa must be positive");
  if (m > cfg.candidate_budget) {
    std::ostringstream os;
    os << "candidate set of size " << m << " exceeds the budget " << cfg.candidate_budget;
    throw BudgetExceeded(os.str());
  }

  const auto xs = s.values();
  const double half_n = 0.5 * static_cast<double>(xs.size());
  std::vector<std::vector<double>> roots(m);
  for (std::size_t i = 0; i < m; ++i)
    roots[i] = sqrt_values(candidates[i], xs);

  // T[i][j] for i < j, mirrored with the opposite sign.
  std::vector<double> T(m * m, 0.0);
  auto fill_row = [&](std::size_t i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double v = half_n * hellinger_part(candidates[i], candidates[j], cfg.quadrature) +
                 kInvSqrt2 * kernels::psi_sum(roots[i], roots[j]);
      T[i * m + j] = v;
      T[j * m + i] = -v;
    }
  };

  unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, m));
  if (workers <= 1) {
    for (std::size_t i = 0; i < m; ++i)
      fill_row(i);
  } else {
    // Rows are dealt round-robin so the triangular workload stays balanced.
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < m; i += workers)
            fill_row(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool)
      th.join();
    for (auto& e : errors)
      if (e)
        std::rethrow_exception(e);
  }

  RhoDiagnostics diag;
  diag.candidate_count = m;
  diag.upsilon.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double best = 0.0; // T(X, t, t) = 0
    for (std::size_t j = 0; j < m; ++j)
      best = std::max(best, T[i * m + j]);
    diag.upsilon[i] = best;
  }
  diag.argmin = static_cast<std::size_t>(
      std::min_element(diag.upsilon.begin(), diag.upsilon.end()) - diag.upsilon.begin());
  const double cutoff = diag.upsilon[diag.argmin] + cfg.kappa;
  for (std::size_t i = 0; i < m; ++i)
    if (diag.upsilon[i] <= cutoff)
      diag.near_minimizers.push_back(i);
  if (m <= cfg.matrix_limit)
    diag.pairwise = std::move(T);

  return {candidates[diag.argmin], std::move(diag)};
}

} // namespace rhoest
