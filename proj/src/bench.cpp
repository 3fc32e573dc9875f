#include "rhoest/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <mutex>
#include <thread>

#include "rhoest/error.hpp"
#include "rhoest/json_io.hpp"
#include "rhoest/rho.hpp"

namespace rhoest {

std::string kind_name(ExperimentKind k) {
  switch (k) {
  case ExperimentKind::contamination: return "contamination";
  case ExperimentKind::rate: return "rate";
  case ExperimentKind::superminimax: return "superminimax";
  case ExperimentKind::approx_audit: return "approx_audit";
  case ExperimentKind::vc_audit: return "vc_audit";
  }
  return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::contamination, ExperimentKind::rate, ExperimentKind::superminimax,
                 ExperimentKind::approx_audit, ExperimentKind::vc_audit})
    if (kind_name(k) == s) return k;
  throw InvalidArgument("unknown experiment kind '" + s + "'");
}

void ExperimentSpec::validate() const {
  if (replicates < 1) throw InvalidArgument("experiment: replicates must be >= 1");
  if (name.empty() || name.find_first_of("/\\,\n") != std::string::npos)
    throw InvalidArgument("experiment: name must be non-empty without separators");
  model.validate();
  if (budget < 2) throw InvalidArgument("experiment: budget must be >= 2");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("experiment: kappa must be positive");
  bool needs_n = kind == ExperimentKind::contamination || kind == ExperimentKind::rate ||
                 kind == ExperimentKind::superminimax;
  if (needs_n) {
    if (n_grid.empty()) throw InvalidArgument("experiment: n grid is empty");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
      if (n_grid[i] < 3) throw InvalidArgument("experiment: n must be >= 3");
      if (i > 0 && n_grid[i] <= n_grid[i - 1])
        throw InvalidArgument("experiment: n grid must be ascending");
    }
    named_truth(truth);
    if (kind == ExperimentKind::superminimax) named_truth(comparison_truth);
  }
  if (kind == ExperimentKind::approx_audit) {
    if (d_grid.empty()) throw InvalidArgument("experiment: D grid is empty");
    for (std::size_t i = 0; i < d_grid.size(); ++i)
      if (d_grid[i] < 1 || (i > 0 && d_grid[i] <= d_grid[i - 1]))
        throw InvalidArgument("experiment: D grid must be ascending and positive");
  }
  if (kind == ExperimentKind::vc_audit && (max_k < 1 || max_k > 12))
    throw InvalidArgument("experiment: max_k must lie in [1, 12]");
}

// ---------------------------------------------------------------------------
// Truths
// ---------------------------------------------------------------------------

Sample Truth::draw(std::size_t n, std::uint64_t seed) const {
  return piecewise ? sample(*piecewise, n, seed) : sample(*function, n, seed);
}

double Truth::h2(const PiecewiseDensity& estimate) const {
  return piecewise ? hellinger2(*piecewise, estimate) : hellinger2(*function, estimate);
}

Truth named_truth(const std::string& name) {
  Truth t;
  t.name = name;
  if (name == "uniform") t.piecewise = uniform_density(0.0, 1.0);
  else if (name == "two_step") t.piecewise = histogram_density({0.0, 0.5, 1.0}, {1.5, 0.5});
  else if (name == "contaminated")
    t.piecewise = histogram_density({0.0, 1.0, 9.0, 10.0}, {0.99, 0.0, 0.01});
  else if (name == "laplace") t.piecewise = laplace_density();
  else if (name == "triangular") t.function = triangular_density();
  else if (name == "parabola") t.function = concave_parabola_density();
  else throw InvalidArgument("unknown truth '" + name + "'");
  return t;
}

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t n, std::size_t replicate) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return seed ^ mix(mix(static_cast<std::uint64_t>(n)) ^ static_cast<std::uint64_t>(replicate));
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

namespace {

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_variate(rng());
}

struct PowerSum {
  double c0;
  std::vector<double> w, g;

  double value(double u) const {
    double s = c0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::pow(u, g[i]);
    return s;
  }
  double slope(double u) const {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * g[i] * std::pow(u, g[i] - 1.0);
    return s;
  }
  // Integral of value(s)^2 over [0, u].
  double sq_integral(double u) const {
    double s = c0 * c0 * u;
    for (std::size_t i = 0; i < w.size(); ++i) {
      s += 2.0 * c0 * w[i] * std::pow(u, g[i] + 1.0) / (g[i] + 1.0);
      for (std::size_t j = 0; j < w.size(); ++j) {
        double e = g[i] + g[j] + 1.0;
        s += w[i] * w[j] * std::pow(u, e) / e;
      }
    }
    return s;
  }
};

PowerSum random_power_sum(std::mt19937_64& rng, double gmin, double gmax) {
  PowerSum p;
  p.c0 = unit_variate(rng()) < 0.5 ? 0.0 : uniform_in(rng, 0.0, 0.5);
  std::size_t terms = 1 + rng() % 3;
  for (std::size_t i = 0; i < terms; ++i) {
    p.w.push_back(uniform_in(rng, 0.2, 1.0));
    p.g.push_back(uniform_in(rng, gmin, gmax));
  }
  return p;
}

double bisect_cdf(const std::function<double(double)>& cdf, double lo, double hi, double u) {
  for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(lo)); ++i) {
    double mid = 0.5 * (lo + hi);
    if (cdf(mid) < u) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

MonotoneInstance random_monotone_instance(std::mt19937_64& rng) {
  PowerSum ps = random_power_sum(rng, 0.2, 3.0);
  bool increasing = rng() % 2 == 1;
  double a = uniform_in(rng, -3.0, 3.0);
  double L = std::exp(uniform_in(rng, -1.5, 1.5));
  double z = ps.sq_integral(1.0) * L; // mass of the unnormalized square
  double root = std::sqrt(z);
  // u is the distance to the vanishing-side end in unit coordinates
  auto to_u = [=](double y) {
    double x = std::clamp((y - a) / L, 0.0, 1.0);
    return increasing ? x : 1.0 - x;
  };
  MonotoneInstance inst;
  inst.sqrt_pieces.push_back(MonotonePiece{
      a, a + L, increasing ? Direction::nondecreasing : Direction::nonincreasing,
      [=](double y) { return ps.value(to_u(y)) / root; }});
  inst.density.pdf = [=](double y) {
    if (y < a || y > a + L) return 0.0;
    double v = ps.value(to_u(y));
    return v * v / z;
  };
  auto cdf = [=](double y) {
    double x = std::clamp((y - a) / L, 0.0, 1.0);
    double total = ps.sq_integral(1.0);
    double part = increasing ? ps.sq_integral(x) : total - ps.sq_integral(1.0 - x);
    return part / total;
  };
  inst.density.quantile = [=](double u) { return bisect_cdf(cdf, a, a + L, u); };
  inst.density.breakpoints = {a, a + L};
  return inst;
}

CurvedInstance random_curved_instance(std::mt19937_64& rng) {
  bool concave = rng() % 2 == 0;
  PowerSum ps = random_power_sum(rng, 1.2, 4.0);
  double a = uniform_in(rng, -3.0, 3.0);
  double L = std::exp(uniform_in(rng, -1.5, 1.5));
  CurvedInstance inst;
  if (concave) {
    // sqrt(t) proportional to C - sum w |x|^g on x in (-1, 1), y = a + L (x + 1) / 2
    double C = ps.c0;
    for (double w : ps.w) C += w;
    PowerSum neg{C, {}, ps.g};
    for (double w : ps.w) neg.w.push_back(-w);
    double z = 2.0 * neg.sq_integral(1.0) * (L / 2.0);
    double root = std::sqrt(z);
    auto to_x = [=](double y) { return std::clamp(2.0 * (y - a) / L - 1.0, -1.0, 1.0); };
    auto f = [=](double y) {
      double x = to_x(y);
      return neg.value(std::fabs(x)) / root;
    };
    auto df = [=](double y) {
      double x = to_x(y);
      double s = -ps.slope(std::fabs(x)) * (x < 0.0 ? -1.0 : 1.0);
      return s * (2.0 / L) / root;
    };
    inst.sqrt_pieces.push_back(CurvedPiece{a, a + L, true, f, df});
    inst.density.pdf = [=](double y) {
      if (y < a || y > a + L) return 0.0;
      double v = f(y);
      return v * v;
    };
    auto cdf = [=](double y) {
      double x = to_x(y);
      double h1 = neg.sq_integral(1.0);
      double hx = neg.sq_integral(std::fabs(x));
      return (h1 + (x < 0.0 ? -hx : hx)) / (2.0 * h1);
    };
    inst.density.quantile = [=](double u) { return bisect_cdf(cdf, a, a + L, u); };
  } else {
    // sqrt(t) proportional to c0 + sum w (1 - x)^g on x in (0, 1), y = a + L x
    double z = ps.sq_integral(1.0) * L;
    double root = std::sqrt(z);
    auto to_u = [=](double y) { return 1.0 - std::clamp((y - a) / L, 0.0, 1.0); };
    auto f = [=](double y) { return ps.value(to_u(y)) / root; };
    auto df = [=](double y) { return -ps.slope(to_u(y)) / L / root; };
    inst.sqrt_pieces.push_back(CurvedPiece{a, a + L, false, f, df});
    inst.density.pdf = [=](double y) {
      if (y < a || y > a + L) return 0.0;
      double v = f(y);
      return v * v;
    };
    auto cdf = [=](double y) {
      double total = ps.sq_integral(1.0);
      return (total - ps.sq_integral(to_u(y))) / total;
    };
    inst.density.quantile = [=](double u) { return bisect_cdf(cdf, a, a + L, u); };
  }
  inst.density.breakpoints = {a, a + L};
  return inst;
}

PiecewiseMonotoneSpec random_monotone_spec(std::mt19937_64& rng, std::size_t k) {
  if (k < 1) throw InvalidArgument("random_monotone_spec: k must be >= 1");
  PiecewiseMonotoneSpec s;
  std::vector<double> ends;
  while (ends.size() + 1 < k) {
    double x = uniform_in(rng, -5.0, 5.0);
    if (std::find(ends.begin(), ends.end(), x) == ends.end()) ends.push_back(x);
  }
  std::sort(ends.begin(), ends.end());
  s.endpoints = ends;
  for (std::size_t j = 0; j < k; ++j) {
    double lo = j == 0 ? -6.0 : ends[j - 1];
    double hi = j + 1 == k ? 6.0 : ends[j];
    bool up = rng() % 2 == 0;
    double base = uniform_in(rng, -1.0, 1.0);
    double amp = uniform_in(rng, 0.2, 1.0) * (up ? 1.0 : -1.0);
    double mid = uniform_in(rng, lo, hi);
    double width = uniform_in(rng, 0.05, 2.0);
    s.directions.push_back(up ? Direction::nondecreasing : Direction::nonincreasing);
    s.pieces.push_back([=](double x) { return base + amp * std::atan((x - mid) / width); });
  }
  for (std::size_t j = 0; j + 1 < k; ++j) s.endpoint_values.push_back(uniform_in(rng, -2.0, 2.0));
  return s;
}

// ---------------------------------------------------------------------------
// Replicates
// ---------------------------------------------------------------------------

namespace {

RhoConfig rho_config(const ExperimentSpec& spec, std::size_t candidates) {
  RhoConfig cfg;
  cfg.kappa = spec.kappa;
  cfg.candidate_budget = std::max<std::size_t>(cfg.candidate_budget, candidates);
  cfg.matrix_limit = 0;
  return cfg;
}

std::vector<PiecewiseDensity> contamination_candidates() {
  std::vector<PiecewiseDensity> c;
  for (int i = 1; i <= 200; ++i) c.push_back(uniform_density(0.0, 0.05 * i));
  return c;
}

template <class F>
double timed(bool on, F&& f) {
  if (!on) {
    f();
    return 0.0;
  }
  auto t0 = std::chrono::steady_clock::now();
  f();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

ExperimentRow fit_row(const ExperimentSpec& spec, const Truth& truth, std::size_t n,
                      std::size_t r, std::uint64_t seed) {
  ExperimentRow row{truth.name, n, r, seed};
  row.wall_ms = timed(spec.record_timing, [&] {
    Sample s = truth.draw(n, seed);
    CandidateSet set = build_candidates(s, spec.model, spec.budget, seed);
    RhoResult fit = rho_estimate(s, set, rho_config(spec, set.size()));
    row.h2 = truth.h2(fit.estimate);
    row.estimator_pieces = fit.estimate.nonzero_segments();
    row.sample_max = s.max();
  });
  return row;
}

std::vector<ExperimentRow> contamination_rows(const ExperimentSpec& spec, std::size_t n,
                                              std::size_t r, std::uint64_t seed) {
  Truth truth = named_truth(spec.truth);
  Sample s = truth.draw(n, seed);
  ExperimentRow rho{"rho", n, r, seed};
  ExperimentRow mle{"mle", n, r, seed};
  rho.sample_max = mle.sample_max = s.max();
  rho.wall_ms = timed(spec.record_timing, [&] {
    auto cands = contamination_candidates();
    RhoResult fit = rho_estimate(s, std::span<const PiecewiseDensity>(cands),
                                 rho_config(spec, cands.size()));
    rho.h2 = truth.h2(fit.estimate);
    rho.estimator_pieces = fit.estimate.nonzero_segments();
  });
  mle.wall_ms = timed(spec.record_timing, [&] {
    PiecewiseDensity u = uniform_density(0.0, s.max());
    mle.h2 = truth.h2(u);
    mle.estimator_pieces = 1;
  });
  return {rho, mle};
}

std::vector<ExperimentRow> approx_rows(const ExperimentSpec& spec, std::size_t D, std::size_t r,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MonotoneInstance mono = random_monotone_instance(rng);
  CurvedInstance curved = random_curved_instance(rng);
  int d = static_cast<int>(D);
  ExperimentRow h{"histogram", D, r, seed};
  h.wall_ms = timed(spec.record_timing, [&] {
    ApproxResult a = histogram_approx(mono.sqrt_pieces, d);
    h.h2 = hellinger2(mono.density, a.density);
    h.bound = a.bound;
    h.estimator_pieces = a.pieces;
    h.violation = h.h2 > a.bound + 1e-9;
  });
  ExperimentRow f{"affine", D, r, seed};
  f.wall_ms = timed(spec.record_timing, [&] {
    ApproxResult a = affine_approx(curved.sqrt_pieces, d);
    f.h2 = hellinger2(curved.density, a.density);
    f.bound = a.bound;
    f.estimator_pieces = a.pieces;
    f.violation = f.h2 > a.bound + 1e-9;
  });
  return {h, f};
}

std::vector<ExperimentRow> vc_rows(const ExperimentSpec& spec, std::size_t k, std::size_t r,
                                   std::uint64_t seed) {
  ExperimentRow row{"level_sets", k, r, seed};
  row.wall_ms = timed(spec.record_timing, [&] {
    std::mt19937_64 rng(seed);
    PiecewiseMonotoneSpec f = random_monotone_spec(rng, k);
    std::size_t worst = 0;
    for (int i = 0; i < 10; ++i) {
      double a = uniform_in(rng, -2.5, 2.5);
      worst = std::max(worst, level_set_intervals(f, a, true).count);
      worst = std::max(worst, level_set_intervals(f, a, false).count);
    }
    row.h2 = static_cast<double>(worst);
    row.bound = static_cast<double>(level_set_bound(k));
    row.estimator_pieces = level_set_bound(k);
    row.violation = worst > level_set_bound(k);
  });
  return {row};
}

std::vector<std::size_t> grid_of(const ExperimentSpec& spec) {
  if (spec.kind == ExperimentKind::approx_audit)
    return {spec.d_grid.begin(), spec.d_grid.end()};
  if (spec.kind == ExperimentKind::vc_audit) {
    std::vector<std::size_t> g;
    for (int k = 1; k <= spec.max_k; ++k) g.push_back(static_cast<std::size_t>(k));
    return g;
  }
  return spec.n_grid;
}

} // namespace

std::vector<ExperimentRow> run_replicate(const ExperimentSpec& spec, std::size_t n,
                                         std::size_t replicate) {
  std::uint64_t seed = replicate_seed(spec.seed, n, replicate);
  switch (spec.kind) {
  case ExperimentKind::contamination: return contamination_rows(spec, n, replicate, seed);
  case ExperimentKind::rate: return {fit_row(spec, named_truth(spec.truth), n, replicate, seed)};
  case ExperimentKind::superminimax:
    return {fit_row(spec, named_truth(spec.truth), n, replicate, seed),
            fit_row(spec, named_truth(spec.comparison_truth), n, replicate,
                    seed ^ 0x5851f42d4c957f2dULL)};
  case ExperimentKind::approx_audit: return approx_rows(spec, n, replicate, seed);
  case ExperimentKind::vc_audit: return vc_rows(spec, n, replicate, seed);
  }
  throw InvalidArgument("unsupported experiment kind");
}

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

double quantile_of(std::vector<double> v, double q) {
  if (v.empty()) throw InvalidArgument("quantile_of: no values");
  std::sort(v.begin(), v.end());
  double pos = q * static_cast<double>(v.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  std::size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

std::vector<SeriesSummary> summarize(std::span<const ExperimentRow> rows) {
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
  for (const auto& r : rows) groups[{r.series, r.n}].push_back(r.h2);
  std::vector<SeriesSummary> out;
  for (auto& [key, v] : groups) {
    SeriesSummary s;
    s.series = key.first;
    s.n = key.second;
    s.count = v.size();
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.median = quantile_of(v, 0.5);
    s.q10 = quantile_of(v, 0.10);
    s.q25 = quantile_of(v, 0.25);
    s.q75 = quantile_of(v, 0.75);
    s.q90 = quantile_of(v, 0.90);
    out.push_back(s);
  }
  return out;
}

SlopeFit fit_loglog_slope(std::span<const double> n, std::span<const double> median) {
  if (n.size() != median.size() || n.size() < 2)
    throw InvalidArgument("fit_loglog_slope: need at least two matching points");
  const std::size_t m = n.size();
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (!(n[i] > 0.0) || !(median[i] > 0.0))
      throw InvalidArgument("fit_loglog_slope: values must be positive");
    x[i] = std::log(n[i]);
    y[i] = std::log(median[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit f;
  f.points = m;
  f.slope = sxy / sxx;
  if (m > 2) {
    double rss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double e = y[i] - (my + f.slope * (x[i] - mx));
      rss += e * e;
    }
    f.std_error = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
  } else {
    f.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return f;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentResult res;
  res.spec = spec;
  {
    Json j = spec_to_json(spec);
    j.erase("output_dir");
    j.erase("threads");
    std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    res.config_hash = h;
  }

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t g : grid_of(spec))
    for (std::size_t r = 0; r < spec.replicates; ++r) tasks.emplace_back(g, r);
  std::vector<std::vector<ExperimentRow>> out(tasks.size());

  unsigned threads = spec.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                       : spec.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, tasks.size()));
  if (threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i)
      out[i] = run_replicate(spec, tasks[i].first, tasks[i].second);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex fail_mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
          try {
            out[i] = run_replicate(spec, tasks[i].first, tasks[i].second);
          } catch (...) {
            std::lock_guard<std::mutex> lock(fail_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
  }
  for (auto& rows : out)
    for (auto& r : rows) res.rows.push_back(std::move(r));

  res.summaries = summarize(res.rows);

  // Slopes per series for the fitted kinds.
  if (spec.kind == ExperimentKind::rate || spec.kind == ExperimentKind::superminimax) {
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> pts;
    for (const auto& s : res.summaries)
      if (s.median > 0.0) {
        pts[s.series].first.push_back(static_cast<double>(s.n));
        pts[s.series].second.push_back(s.median);
      }
    for (auto& [series, xy] : pts) {
      if (xy.first.size() < 2) continue;
      SlopeFit f = fit_loglog_slope(xy.first, xy.second);
      f.series = series;
      res.slopes.push_back(f);
    }
  }

  auto median_of = [&](const std::string& series, std::size_t n) {
    for (const auto& s : res.summaries)
      if (s.series == series && s.n == n) return s.median;
    return std::numeric_limits<double>::quiet_NaN();
  };
  switch (spec.kind) {
  case ExperimentKind::contamination: {
    double reps = 0.0, hit = 0.0, bad_mle = 0.0;
    for (const auto& r : res.rows) {
      if (r.series == "rho") {
        reps += 1.0;
        if (r.sample_max > 9.0) hit += 1.0;
      } else if (r.series == "mle" && r.h2 >= 0.1) {
        bad_mle += 1.0;
      }
    }
    res.metrics["fraction_max_above_9"] = hit / reps;
    res.metrics["fraction_mle_h2_at_least_0.1"] = bad_mle / reps;
    break;
  }
  case ExperimentKind::superminimax: {
    bool ordered = true;
    for (std::size_t n : spec.n_grid)
      ordered = ordered && median_of(spec.truth, n) < median_of(spec.comparison_truth, n);
    res.metrics["ordering_holds"] = ordered ? 1.0 : 0.0;
    break;
  }
  case ExperimentKind::approx_audit:
  case ExperimentKind::vc_audit: {
    double v = 0.0;
    for (const auto& r : res.rows) v += r.violation ? 1.0 : 0.0;
    res.metrics["violations"] = v;
    if (spec.kind == ExperimentKind::vc_audit) {
      double shattered = 0.0;
      for (int k = 1; k <= 3; ++k) {
        std::vector<double> pts;
        for (int i = 0; i < 2 * k + 1; ++i) pts.push_back(static_cast<double>(i));
        if (brute_shatter(interval_union_oracle(pts, k), pts)) shattered += 1.0;
      }
      res.metrics["interval_unions_shattering_2k_plus_1"] = shattered;
    }
    break;
  }
  case ExperimentKind::rate: break;
  }

  if (!spec.output_dir.empty()) write_outputs(res, spec.output_dir);
  return res;
}

std::string rows_csv(const ExperimentResult& r) {
  std::string out = "experiment,kind,n,replicate,seed,h2,estimator_pieces,wall_ms\n";
  const std::string kind = kind_name(r.spec.kind);
  char buf[256];
  for (const auto& row : r.rows) {
    std::snprintf(buf, sizeof buf, ",%zu,%zu,%llu,%.12f,%zu,%.12f\n", row.n, row.replicate,
                  static_cast<unsigned long long>(row.seed), row.h2, row.estimator_pieces,
                  row.wall_ms);
    out += r.spec.name + "," + kind + ":" + row.series + buf;
  }
  return out;
}

void write_outputs(const ExperimentResult& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
  std::filesystem::path base = std::filesystem::path(dir) / r.spec.name;
  write_text_file(base.string() + ".csv", rows_csv(r));
  write_text_file(base.string() + ".summary.json", result_to_json(r).dump(2) + "\n");
}

} // namespace rhoest
