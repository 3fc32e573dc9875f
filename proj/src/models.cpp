#include "rhoest/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "rhoest/error.hpp"

namespace rhoest {

ShapeModel ShapeModel::histogram(int D) {
  ShapeModel m{ModelKind::histogram, D};
  m.validate();
  return m;
}
ShapeModel ShapeModel::piecewise_monotone(int k) {
  ShapeModel m{ModelKind::piecewise_monotone, k};
  m.validate();
  return m;
}
ShapeModel ShapeModel::piecewise_convex_concave(int k) {
  ShapeModel m{ModelKind::piecewise_convex_concave, k};
  m.validate();
  return m;
}
ShapeModel ShapeModel::log_concave() { return ShapeModel{ModelKind::log_concave, 0}; }

void ShapeModel::validate() const {
  switch (kind) {
  case ModelKind::histogram:
    if (param < 1) throw InvalidArgument("histogram model needs D >= 1");
    return;
  case ModelKind::piecewise_monotone:
    if (param < 2) throw InvalidArgument("piecewise monotone model needs k >= 2");
    return;
  case ModelKind::piecewise_convex_concave:
    // Both tails vanish, so at least one bounded piece is needed.
    if (param < 3) throw InvalidArgument("piecewise convex-concave model needs k >= 3");
    return;
  case ModelKind::log_concave:
    return;
  }
  throw InvalidArgument("unsupported model kind");
}

std::string ShapeModel::name() const {
  switch (kind) {
  case ModelKind::histogram: return "histogram(" + std::to_string(param) + ")";
  case ModelKind::piecewise_monotone: return "piecewise_monotone(" + std::to_string(param) + ")";
  case ModelKind::piecewise_convex_concave:
    return "piecewise_convex_concave(" + std::to_string(param) + ")";
  case ModelKind::log_concave: return "log_concave";
  }
  return "unknown";
}

int extremal_degree(const ShapeModel& m, int D) {
  if (D < 1) throw InvalidArgument("extremal_degree: D must be >= 1");
  m.validate();
  switch (m.kind) {
  case ModelKind::histogram: return 4 * (D + 1);
  case ModelKind::piecewise_monotone:
    if (m.param == 2) return 4 * (D + 2);
    return 3 * (m.param + D + 1);
  case ModelKind::piecewise_convex_concave: return 12 * (D + m.param + 1);
  case ModelKind::log_concave: return 12 * (D + 2) + 4;
  }
  throw InvalidArgument("extremal_degree: unsupported model kind");
}

double log_plus(double x) { return std::max(std::log(x), 1.0); }

double rate_bound(double d, double n) {
  if (!(d > 0.0) || !(n > 0.0)) throw InvalidArgument("rate_bound: d and n must be positive");
  double l = log_plus(n / d);
  return d / n * l * l * l;
}

// ---------------------------------------------------------------------------
// Isotonic projections
// ---------------------------------------------------------------------------

std::vector<double> pav_nonincreasing(std::span<const double> values,
                                      std::span<const double> weights) {
  if (values.size() != weights.size()) throw InvalidArgument("pav: size mismatch");
  struct Block {
    double mean, weight;
    std::size_t count;
  };
  std::vector<Block> stack;
  for (std::size_t i = 0; i < values.size(); ++i) {
    double w = weights[i];
    if (!(w > 0.0)) throw InvalidArgument("pav: weights must be positive");
    stack.push_back({values[i], w, 1});
    while (stack.size() > 1 && stack[stack.size() - 2].mean < stack.back().mean) {
      Block top = stack.back();
      stack.pop_back();
      Block& b = stack.back();
      double wsum = b.weight + top.weight;
      b.mean = (b.mean * b.weight + top.mean * top.weight) / wsum;
      b.weight = wsum;
      b.count += top.count;
    }
  }
  std::vector<double> out;
  out.reserve(values.size());
  for (const Block& b : stack) out.insert(out.end(), b.count, b.mean);
  return out;
}

std::vector<double> pav_nondecreasing(std::span<const double> values,
                                      std::span<const double> weights) {
  std::vector<double> neg(values.begin(), values.end());
  for (double& v : neg) v = -v;
  auto out = pav_nonincreasing(neg, weights);
  for (double& v : out) v = -v;
  return out;
}

// ---------------------------------------------------------------------------
// Candidate generation
// ---------------------------------------------------------------------------

namespace {

std::size_t draw_index(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

// Sorted distinct order-statistic indices in [lo, hi] containing both ends and
// `inner` further indices drawn without replacement.
std::vector<std::size_t> random_indices(std::mt19937_64& rng, std::size_t lo, std::size_t hi,
                                        std::size_t inner) {
  std::set<std::size_t> picked{lo, hi};
  std::size_t room = hi > lo + 1 ? hi - lo - 1 : 0;
  inner = std::min(inner, room);
  while (picked.size() < inner + 2) picked.insert(lo + 1 + draw_index(rng, room));
  return {picked.begin(), picked.end()};
}

std::vector<std::size_t> quantile_indices(std::size_t lo, std::size_t hi, std::size_t cells) {
  std::vector<std::size_t> idx;
  for (std::size_t r = 0; r <= cells; ++r) {
    double pos = static_cast<double>(lo) +
                 static_cast<double>(r) * static_cast<double>(hi - lo) / static_cast<double>(cells);
    idx.push_back(static_cast<std::size_t>(std::llround(pos)));
  }
  return idx;
}

std::vector<double> knots_from(std::span<const double> xs, const std::vector<std::size_t>& idx) {
  std::vector<double> k;
  for (std::size_t i : idx) {
    double v = xs[i];
    if (k.empty() || v > k.back()) k.push_back(v);
  }
  return k;
}

std::vector<double> equal_width(double a, double b, std::size_t cells) {
  std::vector<double> k(cells + 1);
  for (std::size_t r = 0; r <= cells; ++r)
    k[r] = a + (b - a) * static_cast<double>(r) / static_cast<double>(cells);
  k.back() = b;
  return k;
}

// Observations per cell; the first cell is closed on the left.
std::vector<double> cell_counts(std::span<const double> xs, const std::vector<double>& knots) {
  std::vector<double> c(knots.size() - 1, 0.0);
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    auto lo = j == 0 ? std::lower_bound(xs.begin(), xs.end(), knots[0])
                     : std::upper_bound(xs.begin(), xs.end(), knots[j]);
    auto hi = std::upper_bound(xs.begin(), xs.end(), knots[j + 1]);
    c[j] = static_cast<double>(hi - lo);
  }
  return c;
}

std::vector<double> lengths(const std::vector<double>& knots) {
  std::vector<double> l(knots.size() - 1);
  for (std::size_t j = 0; j < l.size(); ++j) l[j] = knots[j + 1] - knots[j];
  return l;
}

class Collector {
public:
  Collector(CandidateSet& out, std::size_t budget) : out_(out), budget_(budget) {}

  bool full() const { return out_.densities.size() >= budget_; }

  // Adds the candidate unless it is a duplicate or has zero mass.
  void add(Partition p, std::vector<Form> forms, std::string tag) {
    if (full()) return;
    std::vector<double> key(p.endpoints().begin(), p.endpoints().end());
    for (const Form& f : forms) {
      std::visit(
          [&](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, Constant>) {
              key.insert(key.end(), {0.0, g.c});
            } else if constexpr (std::is_same_v<G, SqrtAffine>) {
              key.insert(key.end(), {1.0, g.p, g.q});
            } else if constexpr (std::is_same_v<G, ExpAffine>) {
              key.insert(key.end(), {2.0, g.alpha, g.beta});
            } else {
              key.push_back(3.0);
            }
          },
          f);
    }
    try {
      PiecewiseDensity d(std::move(p), std::move(forms));
      if (!seen_.insert(std::move(key)).second) return;
      out_.densities.push_back(std::move(d));
      out_.provenance.push_back(std::move(tag));
    } catch (const DegenerateInput&) {
      // all-zero heights after trimming: nothing to add
    }
  }

  void add_histogram(const std::vector<double>& knots, const std::vector<double>& heights,
                     std::string tag) {
    std::vector<Form> forms;
    forms.push_back(Constant{0.0});
    for (double h : heights) forms.push_back(Constant{h});
    forms.push_back(Constant{0.0});
    add(Partition(knots), std::move(forms), std::move(tag));
  }

private:
  CandidateSet& out_;
  std::size_t budget_;
  std::set<std::vector<double>> seen_;
};

std::string fmt_tag(const std::string& base, std::size_t D, const char* knots, int variant) {
  std::ostringstream os;
  os << base << " D=" << D << " knots=" << knots;
  if (variant >= 0) os << " variant=" << variant;
  return os.str();
}

struct KnotPlan {
  std::vector<double> knots;
  const char* source;
  int variant;
};

// Knot plan number `round` for D cells over order statistics [lo, hi].
KnotPlan knot_plan(std::span<const double> xs, std::size_t lo, std::size_t hi, std::size_t D,
                   int round, std::mt19937_64& rng) {
  if (round == 0) return {knots_from(xs, quantile_indices(lo, hi, D)), "quantile", -1};
  if (round == 1) return {equal_width(xs[lo], xs[hi], D), "equal-width", -1};
  return {knots_from(xs, random_indices(rng, lo, hi, D - 1)), "random-quantile", round - 2};
}

const std::size_t kTrims[] = {0, 1, 2, 5};

void histogram_candidates(const Sample& s, int D_model, Collector& col, std::mt19937_64& rng) {
  auto xs = s.values();
  std::size_t n = xs.size();
  std::size_t D = std::min<std::size_t>(static_cast<std::size_t>(D_model), n - 1);
  col.add_histogram({s.min(), s.max()}, {1.0}, "histogram D=1 knots=range");

  // Base configurations: knot schemes crossed with small trims.
  std::vector<KnotPlan> plans;
  for (int round = 0; round < 6 && !col.full(); ++round) {
    for (std::size_t trim : kTrims) {
      if (2 * trim + 2 > n) continue;
      if (D == 1 && round > 0 && trim == 0) continue;
      KnotPlan kp = knot_plan(xs, trim, n - 1 - trim, D, round, rng);
      if (kp.knots.size() < 2) continue;
      auto c = cell_counts(xs, kp.knots);
      auto l = lengths(kp.knots);
      std::vector<double> h(c.size());
      for (std::size_t j = 0; j < h.size(); ++j) h[j] = c[j] / l[j];
      std::ostringstream tag;
      tag << fmt_tag("histogram", D, kp.source, kp.variant) << " trim=" << trim;
      col.add_histogram(kp.knots, h, tag.str());
      plans.push_back(std::move(kp));
    }
  }
  // Multiplicative height grid around each base configuration.
  const double factors[] = {0.8, 1.25};
  for (const KnotPlan& kp : plans) {
    if (col.full()) break;
    auto c = cell_counts(xs, kp.knots);
    auto l = lengths(kp.knots);
    if (c.size() < 2) continue;
    for (std::size_t j = 0; j < c.size() && !col.full(); ++j) {
      for (double f : factors) {
        std::vector<double> h(c.size());
        for (std::size_t i = 0; i < h.size(); ++i) h[i] = c[i] / l[i];
        h[j] *= f;
        std::ostringstream tag;
        tag << fmt_tag("histogram", D, kp.source, kp.variant) << " scale-cell=" << j
            << " factor=" << f;
        col.add_histogram(kp.knots, h, tag.str());
      }
    }
  }
}

std::vector<std::size_t> size_ladder(std::size_t n) {
  static const std::size_t ladder[] = {1, 2, 3, 4, 5, 6, 8, 10, 12, 14, 16, 20, 24, 28, 32, 40, 48};
  std::vector<std::size_t> out;
  for (std::size_t D : ladder)
    if (D <= std::max<std::size_t>(1, n / 4)) out.push_back(D);
  return out;
}

// Order-statistic boundaries of `blocks` consecutive blocks over [0, n-1].
std::vector<std::size_t> block_bounds(std::size_t n, std::size_t blocks, int round,
                                      std::mt19937_64& rng) {
  if (blocks == 1) return {0, n - 1};
  if (round % 2 == 0) return quantile_indices(0, n - 1, blocks);
  return random_indices(rng, 0, n - 1, blocks - 1);
}

// Histogram with blockwise monotone heights. Each block keeps whichever
// direction fits better unless `direction` forces non-increasing.
void monotone_histogram(std::span<const double> xs, const std::vector<std::size_t>& bounds,
                        std::size_t D, int round, bool force_decreasing, Collector& col,
                        std::mt19937_64& rng, const std::string& base) {
  std::vector<double> knots;
  std::vector<std::size_t> block_of_cell;
  const char* source = "quantile";
  for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
    std::size_t lo = bounds[b], hi = bounds[b + 1];
    if (hi <= lo) continue;
    std::size_t cells = std::min(D, hi - lo);
    KnotPlan kp = knot_plan(xs, lo, hi, cells, round / 2, rng);
    source = kp.source;
    for (double k : kp.knots) {
      if (knots.empty()) {
        knots.push_back(k);
      } else if (k > knots.back()) {
        knots.push_back(k);
        block_of_cell.push_back(b);
      }
    }
  }
  if (knots.size() < 2) return;
  auto c = cell_counts(xs, knots);
  auto l = lengths(knots);
  std::vector<double> h(c.size());
  for (std::size_t j = 0; j < h.size(); ++j) h[j] = c[j] / l[j];

  std::size_t start = 0;
  while (start < h.size()) {
    std::size_t end = start;
    while (end < h.size() && block_of_cell[end] == block_of_cell[start]) ++end;
    std::span<const double> hv(h.data() + start, end - start);
    std::span<const double> lv(l.data() + start, end - start);
    auto dec = pav_nonincreasing(hv, lv);
    std::vector<double> best = dec;
    if (!force_decreasing) {
      auto inc = pav_nondecreasing(hv, lv);
      double sd = 0.0, si = 0.0;
      for (std::size_t i = 0; i < hv.size(); ++i) {
        sd += lv[i] * (hv[i] - dec[i]) * (hv[i] - dec[i]);
        si += lv[i] * (hv[i] - inc[i]) * (hv[i] - inc[i]);
      }
      if (si < sd) best = inc;
    }
    std::copy(best.begin(), best.end(), h.begin() + static_cast<std::ptrdiff_t>(start));
    start = end;
  }
  std::ostringstream tag;
  tag << fmt_tag(base, D, source, round) << " blocks=" << bounds.size() - 1 << " projection=pav";
  col.add_histogram(knots, h, tag.str());
}

void monotone_candidates(const Sample& s, int k, Collector& col, std::mt19937_64& rng) {
  auto xs = s.values();
  std::size_t n = xs.size();
  col.add_histogram({s.min(), s.max()}, {1.0}, "piecewise_monotone D=1 knots=range");
  bool s_bar = k == 2;
  std::size_t blocks = s_bar ? 1 : static_cast<std::size_t>(k - 2);
  blocks = std::min(blocks, n / 2);
  auto ladder = size_ladder(n);
  for (int round = 0; round < 64 && !col.full(); ++round) {
    for (std::size_t D : ladder) {
      if (col.full()) break;
      if (s_bar && D == 1) continue;
      auto bounds = block_bounds(n, blocks, round, rng);
      monotone_histogram(xs, bounds, D, round, s_bar, col, rng, "piecewise_monotone");
    }
  }
}

// Square roots of smoothed heights at the knots of a histogram.
std::vector<double> sqrt_anchor_values(const std::vector<double>& h) {
  std::size_t m = h.size();
  std::vector<double> v(m + 1);
  v[0] = std::sqrt(h[0]);
  v[m] = std::sqrt(h[m - 1]);
  for (std::size_t i = 1; i < m; ++i) v[i] = std::sqrt(0.5 * (h[i - 1] + h[i]));
  return v;
}

// Closest concave (or convex) piecewise-affine fit through the anchors, kept
// non-negative.
std::vector<double> curvature_fit(const std::vector<double>& z, const std::vector<double>& v,
                                  bool concave, double* sse) {
  std::size_t m = z.size() - 1;
  std::vector<double> slope(m), len(m);
  for (std::size_t i = 0; i < m; ++i) {
    len[i] = z[i + 1] - z[i];
    slope[i] = (v[i + 1] - v[i]) / len[i];
  }
  auto s = concave ? pav_nonincreasing(slope, len) : pav_nondecreasing(slope, len);
  std::vector<double> cum(m + 1, 0.0);
  for (std::size_t i = 0; i < m; ++i) cum[i + 1] = cum[i] + s[i] * len[i];
  double shift = 0.0;
  for (std::size_t i = 0; i <= m; ++i) shift += v[i] - cum[i];
  shift /= static_cast<double>(m + 1);
  std::vector<double> out(m + 1);
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= m; ++i) {
    out[i] = shift + cum[i];
    lowest = std::min(lowest, out[i]);
  }
  if (lowest < 0.0)
    for (double& o : out) o -= lowest;
  *sse = 0.0;
  for (std::size_t i = 0; i <= m; ++i) *sse += (out[i] - v[i]) * (out[i] - v[i]);
  return out;
}

void convex_concave_candidates(const Sample& s, int k, Collector& col, std::mt19937_64& rng) {
  auto xs = s.values();
  std::size_t n = xs.size();
  {
    std::vector<Form> f{Constant{0.0}, SqrtAffine{1.0, 0.0}, Constant{0.0}};
    col.add(Partition({s.min(), s.max()}), std::move(f), "piecewise_convex_concave D=1 knots=range");
  }
  std::size_t blocks = std::min<std::size_t>(static_cast<std::size_t>(k - 2), n / 2);
  auto ladder = size_ladder(n);
  for (int round = 0; round < 64 && !col.full(); ++round) {
    for (std::size_t D : ladder) {
      if (col.full()) break;
      auto bounds = block_bounds(n, blocks, round, rng);
      std::vector<double> knots;
      std::vector<Form> forms{Constant{0.0}};
      const char* source = "quantile";
      for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        std::size_t lo = bounds[b], hi = bounds[b + 1];
        if (hi <= lo) continue;
        KnotPlan kp = knot_plan(xs, lo, hi, std::min(D, hi - lo), round / 2, rng);
        source = kp.source;
        std::vector<double> z = kp.knots;
        if (!knots.empty()) {
          // Blocks share their boundary knot; drop anchors not beyond it.
          while (!z.empty() && z.front() < knots.back()) z.erase(z.begin());
          if (!z.empty() && z.front() == knots.back()) {
            if (z.size() < 2) continue;
          } else {
            z.insert(z.begin(), knots.back());
          }
        }
        if (z.size() < 2) continue;
        auto c = cell_counts(xs, z);
        auto l = lengths(z);
        std::vector<double> h(c.size());
        for (std::size_t j = 0; j < h.size(); ++j) h[j] = c[j] / l[j];
        auto v = sqrt_anchor_values(h);
        double sse_cc = 0.0, sse_cv = 0.0;
        auto cc = curvature_fit(z, v, true, &sse_cc);
        auto cv = curvature_fit(z, v, false, &sse_cv);
        const auto& fit = sse_cv < sse_cc ? cv : cc;
        if (knots.empty()) knots.push_back(z.front());
        for (std::size_t i = 0; i + 1 < z.size(); ++i) {
          double q = (fit[i + 1] - fit[i]) / (z[i + 1] - z[i]);
          double p = fit[i] - q * z[i];
          forms.push_back(SqrtAffine{p, q});
          knots.push_back(z[i + 1]);
        }
      }
      if (knots.size() < 2) continue;
      forms.push_back(Constant{0.0});
      std::ostringstream tag;
      tag << fmt_tag("piecewise_convex_concave", D, source, round) << " blocks=" << blocks
          << " projection=slope-pav";
      col.add(Partition(knots), std::move(forms), tag.str());
    }
  }
}

// Two-sided exponential fits with a single knot m: log t is affine on each
// side and continuous at m. For fixed m the likelihood is maximized in closed
// form by the scales u = 1/a, v = 1/b with u / v = sqrt(S_L / S_R).
void two_sided_exponential_candidates(std::span<const double> xs, Collector& col) {
  const std::size_t n = xs.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + xs[i];
  struct Fit {
    double ll, m, a, b;
  };
  std::vector<Fit> fits;
  const std::size_t grid = 64;
  for (std::size_t g = 1; g < grid; ++g) {
    std::size_t idx = static_cast<std::size_t>(std::llround(static_cast<double>(g) *
                                                            static_cast<double>(n - 1) / grid));
    double m = xs[idx];
    auto left = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), m) - xs.begin());
    double sl = static_cast<double>(left) * m - prefix[left];
    double sr = (prefix[n] - prefix[left]) - static_cast<double>(n - left) * m;
    if (!(sl > 0.0) || !(sr > 0.0)) continue;
    double r = std::sqrt(sl / sr);
    double v = (sl + sr) * (r + 1.0) / (static_cast<double>(n) * (r * r + 1.0));
    double u = r * v;
    double a = 1.0 / u, b = 1.0 / v;
    double c = -std::log(u + v);
    double ll = static_cast<double>(n) * c - a * sl - b * sr;
    if (fits.empty() || fits.back().m != m) fits.push_back({ll, m, a, b});
  }
  std::stable_sort(fits.begin(), fits.end(), [](const Fit& x, const Fit& y) { return x.ll > y.ll; });
  for (std::size_t i = 0; i < fits.size() && i < 8; ++i) {
    const Fit& f = fits[i];
    std::vector<Form> forms{ExpAffine{-f.a * f.m, f.a}, ExpAffine{f.b * f.m, -f.b}};
    std::ostringstream tag;
    tag << "log_concave D=2 knots=likelihood-rank-" << i << " projection=none tails=exp";
    col.add(Partition({f.m}), std::move(forms), tag.str());
  }
}

void log_concave_candidates(const Sample& s, Collector& col, std::mt19937_64& rng) {
  auto xs = s.values();
  std::size_t n = xs.size();
  two_sided_exponential_candidates(xs, col);
  auto ladder = size_ladder(n);
  const double tail_factors[] = {0.0, 1.0, 0.5, 2.0};
  for (int round = 0; round < 64 && !col.full(); ++round) {
    for (std::size_t D : ladder) {
      if (col.full()) break;
      if (D > 16) continue;
      KnotPlan kp = round == 0 ? knot_plan(xs, 0, n - 1, D, 0, rng)
                               : knot_plan(xs, 0, n - 1, D, round + 1, rng);
      const auto& z = kp.knots;
      if (z.size() < 2) continue;
      std::size_t m = z.size() - 1;
      auto c = cell_counts(xs, z);
      auto l = lengths(z);
      std::vector<double> h(m);
      for (std::size_t j = 0; j < m; ++j) h[j] = (c[j] + 0.5) / l[j];
      std::vector<double> ell(m + 1);
      ell[0] = std::log(h[0]);
      ell[m] = std::log(h[m - 1]);
      for (std::size_t i = 1; i < m; ++i) ell[i] = std::log(0.5 * (h[i - 1] + h[i]));
      std::vector<double> slope(m);
      for (std::size_t i = 0; i < m; ++i) slope[i] = (ell[i + 1] - ell[i]) / l[i];
      std::sort(slope.begin(), slope.end(), std::greater<>());
      std::vector<double> g(m + 1);
      g[0] = ell[0];
      for (std::size_t i = 0; i < m; ++i) g[i + 1] = g[i] + slope[i] * l[i];
      // Keep exponents moderate; normalization absorbs the shift.
      double top = *std::max_element(g.begin(), g.end());
      for (double& gi : g) gi -= top;

      std::vector<Form> body;
      double body_mass = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        ExpAffine e{g[i] - slope[i] * z[i], slope[i]};
        body_mass += form_integral(Form{e}, z[i], z[i + 1]);
        body.push_back(e);
      }
      for (double tf : tail_factors) {
        if (col.full()) break;
        std::vector<Form> forms;
        std::ostringstream tag;
        tag << fmt_tag("log_concave", m, kp.source, kp.variant) << " projection=slope-sort";
        if (tf == 0.0) {
          forms.push_back(Constant{0.0});
          forms.insert(forms.end(), body.begin(), body.end());
          forms.push_back(Constant{0.0});
          tag << " tails=zero";
        } else {
          double nn = static_cast<double>(n + 1);
          double left_rate = tf * std::exp(g[0]) / body_mass * nn;
          double right_rate = tf * std::exp(g[m]) / body_mass * nn;
          double bl = std::max(slope.front(), left_rate);
          double br = std::min(slope.back(), -right_rate);
          forms.push_back(ExpAffine{g[0] - bl * z[0], bl});
          forms.insert(forms.end(), body.begin(), body.end());
          forms.push_back(ExpAffine{g[m] - br * z[m], br});
          tag << " tails=exp factor=" << tf;
        }
        col.add(Partition(z), std::move(forms), tag.str());
      }
    }
  }
}

} // namespace

CandidateSet build_candidates(const Sample& s, const ShapeModel& m, std::size_t budget,
                              std::uint64_t seed) {
  m.validate();
  if (budget < 2) throw InvalidArgument("build_candidates: budget must be >= 2");
  if (!(s.max() > s.min())) throw DegenerateInput("build_candidates: all sample points are equal");
  CandidateSet out;
  out.model = m;
  Collector col(out, budget);
  std::mt19937_64 rng(seed);
  switch (m.kind) {
  case ModelKind::histogram: histogram_candidates(s, m.param, col, rng); break;
  case ModelKind::piecewise_monotone: monotone_candidates(s, m.param, col, rng); break;
  case ModelKind::piecewise_convex_concave: convex_concave_candidates(s, m.param, col, rng); break;
  case ModelKind::log_concave: log_concave_candidates(s, col, rng); break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Validators
// ---------------------------------------------------------------------------

namespace {

bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

bool constant_heights(const PiecewiseDensity& d, std::vector<double>& h, std::string* why) {
  h.clear();
  for (const Form& f : d.forms()) {
    const auto* c = std::get_if<Constant>(&f);
    if (!c) return fail(why, "segment is not piecewise constant");
    h.push_back(c->c);
  }
  return true;
}

// Fewest contiguous runs, each monotone in one direction.
std::size_t monotone_runs(const std::vector<double>& h) {
  std::size_t runs = 1;
  int dir = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    int step = h[i] > h[i - 1] ? 1 : (h[i] < h[i - 1] ? -1 : 0);
    if (step == 0) continue;
    if (dir == 0) {
      dir = step;
    } else if (step != dir) {
      ++runs;
      dir = 0;
    }
  }
  return runs;
}

bool check_histogram(const PiecewiseDensity& d, int D, std::string* why) {
  std::vector<double> h;
  if (!constant_heights(d, h, why)) return false;
  std::size_t first = h.size(), last = 0;
  for (std::size_t j = 0; j < h.size(); ++j)
    if (h[j] != 0.0) {
      first = std::min(first, j);
      last = j;
    }
  if (first == h.size()) return fail(why, "density is identically zero");
  std::size_t pieces = 1;
  for (std::size_t j = first + 1; j <= last; ++j)
    if (h[j] != h[j - 1]) ++pieces;
  if (pieces > static_cast<std::size_t>(D))
    return fail(why, "histogram has " + std::to_string(pieces) + " pieces, model allows " +
                         std::to_string(D));
  return true;
}

bool check_monotone(const PiecewiseDensity& d, int k, std::string* why) {
  std::vector<double> h;
  if (!constant_heights(d, h, why)) return false;
  if (k == 2) {
    std::size_t first = 0;
    while (first < h.size() && h[first] == 0.0) ++first;
    for (std::size_t j = first + 1; j < h.size(); ++j)
      if (h[j] > h[j - 1]) return fail(why, "heights increase at segment " + std::to_string(j));
    return true;
  }
  std::size_t runs = monotone_runs(h);
  if (runs > static_cast<std::size_t>(k))
    return fail(why, "needs " + std::to_string(runs) + " monotone pieces, model allows " +
                         std::to_string(k));
  return true;
}

// Affine pieces of sqrt(t) on the bounded segments: value at both ends.
bool check_convex_concave(const PiecewiseDensity& d, int k, std::string* why) {
  const std::size_t S = d.segment_count();
  struct Piece {
    double lo, hi, vlo, vhi, slope;
  };
  std::vector<Piece> pieces;
  double scale = 0.0, slope_scale = 0.0;
  for (std::size_t j = 0; j < S; ++j) {
    Segment seg = d.segment(j);
    const Form& f = *seg.form;
    if (form_is_zero(f)) {
      if (!std::isfinite(seg.lo) || !std::isfinite(seg.hi)) continue;
      pieces.push_back({seg.lo, seg.hi, 0.0, 0.0, 0.0});
      continue;
    }
    if (!std::isfinite(seg.lo) || !std::isfinite(seg.hi))
      return fail(why, "non-zero unbounded segment");
    double p, q;
    if (const auto* c = std::get_if<Constant>(&f)) {
      p = std::sqrt(c->c);
      q = 0.0;
    } else if (const auto* a = std::get_if<SqrtAffine>(&f)) {
      p = a->p;
      q = a->q;
    } else {
      return fail(why, "segment is not square-root affine");
    }
    double vlo = p + q * seg.lo, vhi = p + q * seg.hi;
    double tol = 1e-9 * (std::fabs(p) + std::fabs(q) * std::max(std::fabs(seg.lo), std::fabs(seg.hi)));
    if (vlo < -tol || vhi < -tol) return fail(why, "square root clipped inside segment " + std::to_string(j));
    pieces.push_back({seg.lo, seg.hi, vlo, vhi, q});
    scale = std::max({scale, std::fabs(vlo), std::fabs(vhi)});
    slope_scale = std::max(slope_scale, std::fabs(q));
  }
  // Greedy count of maximal convex or concave runs; a run continues across a
  // knot only when sqrt(t) is continuous there.
  double vtol = 1e-7 * scale, stol = 1e-7 * slope_scale;
  std::size_t runs = 0;
  bool in_run = false;
  int curv = 0;
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const Piece& pc = pieces[j];
    bool zero = pc.vlo == 0.0 && pc.vhi == 0.0 && pc.slope == 0.0;
    if (!in_run) {
      if (zero) continue; // zero stretches outside a run merge with neighbours
      in_run = true;
      curv = 0;
      ++runs;
      continue;
    }
    const Piece& prev = pieces[j - 1];
    bool continuous = std::fabs(prev.vhi - pc.vlo) <= vtol;
    double ds = pc.slope - prev.slope;
    int step = ds > stol ? 1 : (ds < -stol ? -1 : 0);
    if (!continuous) {
      if (zero) {
        in_run = false;
        continue;
      }
      ++runs;
      curv = 0;
      continue;
    }
    if (step == 0) continue;
    if (curv == 0) {
      curv = step;
    } else if (step != curv) {
      if (zero) {
        in_run = false;
        continue;
      }
      ++runs;
      curv = 0;
    }
  }
  // Two vanishing tails plus one piece per run.
  if (runs + 2 > static_cast<std::size_t>(k))
    return fail(why, "needs " + std::to_string(runs) + " convex/concave pieces, model allows " +
                         std::to_string(k - 2));
  return true;
}

bool check_log_concave(const PiecewiseDensity& d, std::string* why) {
  const std::size_t S = d.segment_count();
  std::size_t first = S, last = 0;
  for (std::size_t j = 0; j < S; ++j)
    if (!form_is_zero(d.forms()[j])) {
      first = std::min(first, j);
      last = j;
    }
  if (first == S) return fail(why, "density is identically zero");
  double prev_beta = std::numeric_limits<double>::infinity();
  for (std::size_t j = first; j <= last; ++j) {
    Segment seg = d.segment(j);
    double alpha, beta;
    if (const auto* e = std::get_if<ExpAffine>(seg.form)) {
      alpha = e->alpha;
      beta = e->beta;
    } else if (const auto* c = std::get_if<Constant>(seg.form); c && c->c > 0.0) {
      alpha = std::log(c->c);
      beta = 0.0;
    } else {
      return fail(why, "segment " + std::to_string(j) + " is not log-affine");
    }
    if (beta > prev_beta + 1e-9 * std::max(1.0, std::fabs(prev_beta)))
      return fail(why, "log-slope increases at segment " + std::to_string(j));
    if (j > first) {
      const Form& pf = *d.segment(j - 1).form;
      double x = seg.lo;
      double left = std::log(form_value(pf, x));
      double right = alpha + beta * x;
      if (std::fabs(left - right) > 1e-8 * std::max(1.0, std::fabs(left)))
        return fail(why, "log-density jumps at knot " + std::to_string(j));
    }
    prev_beta = beta;
  }
  return true;
}

} // namespace

bool satisfies_shape(const PiecewiseDensity& d, const ShapeModel& m, std::string* why) {
  m.validate();
  switch (m.kind) {
  case ModelKind::histogram: return check_histogram(d, m.param, why);
  case ModelKind::piecewise_monotone: return check_monotone(d, m.param, why);
  case ModelKind::piecewise_convex_concave: return check_convex_concave(d, m.param, why);
  case ModelKind::log_concave: return check_log_concave(d, why);
  }
  return fail(why, "unsupported model kind");
}

} // namespace rhoest
