#include "rhoest/approx.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rhoest/error.hpp"

namespace rhoest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kProbe = 1000;

void check_interval(double a, double b, const char* what) {
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw InvalidArgument(std::string(what) + ": needs a finite interval a < b");
}

double probe_point(double a, double b, int i, int count) {
  if (i == 0) return a;
  if (i == count - 1) return b;
  return a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
}

double term(double len, double var, int order) {
  if (var == 0.0) return 0.0;
  if (!std::isfinite(len) || !std::isfinite(var)) return kInf;
  if (order == 0) return std::cbrt(len * var * var);
  return std::pow(len * len * len * var * var, 0.2);
}

void check_order(int order) {
  if (order != 0 && order != 1) throw InvalidArgument("functional order must be 0 or 1");
}

void check_contiguous(double prev_b, double a) {
  if (a != prev_b) throw InvalidArgument("pieces must be consecutive");
}

} // namespace

void check_monotone(const MonotonePiece& p) {
  check_interval(p.a, p.b, "monotone piece");
  if (!p.f) throw InvalidArgument("monotone piece has no evaluator");
  double prev = p.f(p.a);
  if (std::isnan(prev)) throw ShapeViolation("monotone piece evaluates to NaN");
  for (int i = 1; i < kProbe; ++i) {
    double x = probe_point(p.a, p.b, i, kProbe);
    double v = p.f(x);
    if (std::isnan(v)) throw ShapeViolation("monotone piece evaluates to NaN");
    double slack = std::isfinite(v) && std::isfinite(prev)
                       ? 1e-12 * std::max({1.0, std::fabs(v), std::fabs(prev)})
                       : 0.0;
    bool ok = p.direction == Direction::nonincreasing ? v <= prev + slack : v >= prev - slack;
    if (!ok)
      throw ShapeViolation("piece is not monotone in its declared direction near x = " +
                           std::to_string(x));
    prev = v;
  }
}

double variation(const MonotonePiece& p) {
  check_monotone(p);
  double fa = p.f(p.a), fb = p.f(p.b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) return kInf;
  return std::fabs(fa - fb);
}

FunctionalReport aggregate_functional(std::vector<double> lengths, std::vector<double> variations,
                                      int order) {
  check_order(order);
  if (lengths.size() != variations.size())
    throw InvalidArgument("functional: lengths and variations differ in size");
  FunctionalReport r;
  r.order = order;
  double sum = 0.0;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    double t = term(lengths[j], variations[j], order);
    r.terms.push_back(t);
    sum += t;
  }
  r.value = order == 0 ? sum * sum * sum : std::pow(sum, 5.0);
  r.lengths = std::move(lengths);
  r.variations = std::move(variations);
  return r;
}

FunctionalReport functional(std::span<const MonotonePiece> pieces, int order) {
  check_order(order);
  if (pieces.empty()) throw InvalidArgument("functional: no pieces");
  std::vector<double> len, var;
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    if (j > 0) check_contiguous(pieces[j - 1].b, pieces[j].a);
    len.push_back(pieces[j].b - pieces[j].a);
    var.push_back(variation(pieces[j]));
  }
  return aggregate_functional(std::move(len), std::move(var), order);
}

namespace {

double sqrt_value(const Form& f, double x) {
  if (std::holds_alternative<SumForm>(f))
    throw InvalidArgument("functional: mixture segments are not supported");
  return std::sqrt(std::max(form_value(f, x), 0.0));
}

// `toward` picks the one-sided limit when sqrt(t) vanishes exactly at x.
double sqrt_slope(const Form& f, double x, double toward) {
  if (std::get_if<Constant>(&f)) return 0.0;
  if (const auto* s = std::get_if<SqrtAffine>(&f)) {
    double v = s->p + s->q * x;
    if (v == 0.0) v = s->q * (toward - x);
    return v > 0.0 ? s->q : 0.0;
  }
  if (const auto* e = std::get_if<ExpAffine>(&f))
    return 0.5 * e->beta * std::exp(0.5 * (e->alpha + e->beta * x));
  throw InvalidArgument("functional: mixture segments are not supported");
}

} // namespace

FunctionalReport functional(const PiecewiseDensity& t, const Partition& partition, int order) {
  check_order(order);
  auto g = [order](const Form& f, double x, double toward) {
    return order == 0 ? sqrt_value(f, x) : sqrt_slope(f, x, toward);
  };
  const Partition& own = t.partition();
  std::vector<double> len, var;
  for (std::size_t c = 0; c < partition.interval_count(); ++c) {
    auto [lo, hi] = partition.interval(c);
    // Sequence of one-sided limits of g across the density segments met.
    std::vector<double> seq;
    bool nonzero = false;
    for (std::size_t j = 0; j < own.interval_count(); ++j) {
      auto [slo, shi] = own.interval(j);
      double u = std::max(lo, slo), v = std::min(hi, shi);
      if (!(u < v)) continue;
      const Form& f = t.forms()[j];
      if (!form_is_zero(f)) nonzero = true;
      if (std::isfinite(u)) seq.push_back(g(f, u, v));
      else seq.push_back(0.0);
      if (const auto* s = std::get_if<SqrtAffine>(&f); s && s->q != 0.0) {
        double root = -s->p / s->q;
        if (root > u && root < v) {
          // sqrt(t) has a kink at the clipping point
          if (order == 1) {
            seq.push_back(s->q > 0 ? 0.0 : s->q);
            seq.push_back(s->q > 0 ? s->q : 0.0);
          } else {
            seq.push_back(0.0);
          }
        }
      }
      if (std::isfinite(v)) seq.push_back(g(f, v, u));
      else seq.push_back(0.0);
    }
    double l = hi - lo;
    if (!std::isfinite(l)) {
      len.push_back(kInf);
      var.push_back(nonzero ? kInf : 0.0);
      continue;
    }
    bool up = true, down = true;
    for (std::size_t i = 1; i < seq.size(); ++i) {
      double tol = 1e-12 * std::max({1.0, std::fabs(seq[i]), std::fabs(seq[i - 1])});
      if (seq[i] > seq[i - 1] + tol) down = false;
      if (seq[i] < seq[i - 1] - tol) up = false;
    }
    if (!up && !down)
      throw ShapeViolation("functional: not monotone on interval " + std::to_string(c));
    auto [mn, mx] = std::minmax_element(seq.begin(), seq.end());
    len.push_back(l);
    var.push_back(*mx - *mn);
  }
  return aggregate_functional(std::move(len), std::move(var), order);
}

DebaseResult debase_approx(const MonotonePiece& p, double R, int D) {
  check_interval(p.a, p.b, "debase_approx");
  if (D < 1) throw InvalidArgument("debase_approx: D must be >= 1");
  double V = variation(p);
  if (!std::isfinite(V)) throw InvalidArgument("debase_approx: infinite variation");
  if (R == V && V > 0.0) R = (1.0 + 1e-6) * V;
  if (R < V || (R == V && V > 0.0)) throw InvalidArgument("debase_approx: R must exceed the variation");

  const double a = p.a, b = p.b;
  auto g = [&](double x) { return p.direction == Direction::nonincreasing ? p.f(x) : -p.f(x); };
  std::vector<double> knots{a};
  if (V == 0.0) {
    knots.push_back(b);
  } else {
    const double step = R / D;
    const double width = 1e-12 * (b - a);
    const double gb = g(b);
    while (knots.back() < b) {
      double x = knots.back();
      double gx = g(x);
      if (gx - gb <= step) {
        knots.push_back(b);
        break;
      }
      double lo = x, hi = b;
      while (hi - lo > width) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (gx - g(mid) <= step) lo = mid;
        else hi = mid;
      }
      knots.push_back(hi);
      if (knots.size() > static_cast<std::size_t>(D) + 2)
        throw ShapeViolation("debase_approx: drop threshold crossed too often; is f monotone?");
    }
  }

  DebaseResult r;
  r.R = R;
  std::vector<double> refined{a};
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    double lo = knots[j], hi = knots[j + 1], L = hi - lo;
    r.means.push_back(quad::integrate(p.f, lo, hi) / L);
    auto parts = static_cast<std::size_t>(std::ceil(static_cast<double>(D) * L / (b - a)));
    parts = std::max<std::size_t>(parts, 1);
    for (std::size_t s = 1; s < parts; ++s)
      refined.push_back(lo + L * static_cast<double>(s) / static_cast<double>(parts));
    refined.push_back(hi);
  }
  r.partition = Partition(std::move(knots));
  r.refined = Partition(std::move(refined));
  return r;
}

void check_curvature(const CurvedPiece& p) {
  check_interval(p.a, p.b, "curved piece");
  if (!p.f || !p.df) throw InvalidArgument("curved piece needs f and its derivative");
  std::vector<double> v(kProbe);
  double scale = 0.0;
  for (int i = 0; i < kProbe; ++i) {
    v[i] = p.f(probe_point(p.a, p.b, i, kProbe));
    if (!std::isfinite(v[i])) throw ShapeViolation("curved piece is not finite on its interval");
    scale = std::max(scale, std::fabs(v[i]));
  }
  double tol = 16.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  for (int i = 1; i + 1 < kProbe; ++i) {
    double second = v[i - 1] + v[i + 1] - 2.0 * v[i];
    if (p.concave ? second > tol : second < -tol)
      throw ShapeViolation(std::string("piece is not ") + (p.concave ? "concave" : "convex") +
                           " near x = " + std::to_string(probe_point(p.a, p.b, i, kProbe)));
  }
  check_monotone(MonotonePiece{p.a, p.b,
                               p.concave ? Direction::nonincreasing : Direction::nondecreasing,
                               p.df});
}

ChordResult chord_approx(const CurvedPiece& p) {
  check_curvature(p);
  double dv = std::fabs(p.df(p.a) - p.df(p.b));
  if (!std::isfinite(dv)) throw InvalidArgument("chord_approx: derivative variation is infinite");
  ChordResult r;
  double fa = p.f(p.a), fb = p.f(p.b);
  r.slope = (fb - fa) / (p.b - p.a);
  r.intercept = fa - r.slope * p.a;
  r.bound = (p.b - p.a) / 4.0 * dv;
  const int probes = 1001;
  for (int i = 0; i < probes; ++i) {
    double x = probe_point(p.a, p.b, i, probes);
    r.sup_error = std::max(r.sup_error, std::fabs(p.f(x) - (r.intercept + r.slope * x)));
  }
  return r;
}

Allocation allocate_pieces(std::span<const double> lengths, std::span<const double> variations,
                           int D, int order) {
  check_order(order);
  if (lengths.empty() || lengths.size() != variations.size())
    throw InvalidArgument("allocate_pieces: need matching non-empty lengths and variations");
  if (D < 1) throw InvalidArgument("allocate_pieces: D must be >= 1");
  std::vector<double> w(lengths.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(lengths[j] > 0.0) || !std::isfinite(lengths[j]))
      throw InvalidArgument("allocate_pieces: lengths must be positive and finite");
    if (!(variations[j] >= 0.0) || !std::isfinite(variations[j]))
      throw InvalidArgument("allocate_pieces: variations must be finite and non-negative");
    w[j] = term(lengths[j], variations[j], order);
    sum += w[j];
  }
  Allocation out;
  if (sum == 0.0) {
    out.pieces.assign(w.size(), 1);
    out.degenerate = true;
    return out;
  }
  for (double wj : w) {
    double x = static_cast<double>(D) * wj / sum;
    double c = std::ceil(x - 1e-9 * std::max(1.0, x));
    out.pieces.push_back(std::max(1, static_cast<int>(c)));
  }
  return out;
}

namespace {

PiecewiseDensity assemble(std::vector<double> knots, std::vector<Form> inner) {
  std::vector<Form> forms;
  forms.reserve(inner.size() + 2);
  forms.push_back(Constant{0.0});
  for (Form& f : inner) forms.push_back(std::move(f));
  forms.push_back(Constant{0.0});
  return normalize_sqrt(PiecewiseFunction(Partition(std::move(knots)), std::move(forms)));
}

} // namespace

ApproxResult histogram_approx(std::span<const MonotonePiece> sqrt_pieces, int D) {
  if (D < 1) throw InvalidArgument("histogram_approx: D must be >= 1");
  FunctionalReport m = functional(sqrt_pieces, 0);
  if (!std::isfinite(m.value)) throw InvalidArgument("histogram_approx: the functional is infinite");
  Allocation alloc = allocate_pieces(m.lengths, m.variations, D, 0);

  std::vector<double> knots{sqrt_pieces.front().a};
  std::vector<Form> inner;
  for (std::size_t j = 0; j < sqrt_pieces.size(); ++j) {
    DebaseResult dr = debase_approx(sqrt_pieces[j], m.variations[j], alloc.pieces[j]);
    auto ends = dr.partition.endpoints();
    for (std::size_t c = 0; c < dr.means.size(); ++c) {
      double mean = std::max(dr.means[c], 0.0);
      inner.push_back(Constant{mean * mean});
      knots.push_back(ends[c + 1]);
    }
  }
  ApproxResult r{assemble(std::move(knots), std::move(inner)), std::move(alloc), std::move(m), 0.0, 0};
  r.bound = std::min(r.functional.value / (4.0 * D * D), 1.0);
  r.pieces = r.density.nonzero_segments();
  return r;
}

ApproxResult affine_approx(std::span<const CurvedPiece> sqrt_pieces, int D) {
  if (D < 1) throw InvalidArgument("affine_approx: D must be >= 1");
  if (sqrt_pieces.empty()) throw InvalidArgument("affine_approx: no pieces");
  std::vector<MonotonePiece> slopes;
  for (std::size_t j = 0; j < sqrt_pieces.size(); ++j) {
    const CurvedPiece& p = sqrt_pieces[j];
    if (j > 0) check_contiguous(sqrt_pieces[j - 1].b, p.a);
    check_curvature(p);
    slopes.push_back(MonotonePiece{p.a, p.b,
                                   p.concave ? Direction::nonincreasing : Direction::nondecreasing,
                                   p.df});
  }
  FunctionalReport m = functional(slopes, 1);
  if (!std::isfinite(m.value)) throw InvalidArgument("affine_approx: the functional is infinite");
  Allocation alloc = allocate_pieces(m.lengths, m.variations, D, 1);

  std::vector<double> knots{sqrt_pieces.front().a};
  std::vector<Form> inner;
  for (std::size_t j = 0; j < sqrt_pieces.size(); ++j) {
    const CurvedPiece& p = sqrt_pieces[j];
    DebaseResult dr = debase_approx(slopes[j], m.variations[j], alloc.pieces[j]);
    std::vector<double> ends(dr.refined.endpoints().begin(), dr.refined.endpoints().end());
    // A lone chord across a piece that vanishes at both ends is identically zero.
    if (ends.size() == 2) ends.insert(ends.begin() + 1, 0.5 * (ends[0] + ends[1]));
    for (std::size_t c = 0; c + 1 < ends.size(); ++c) {
      double lo = ends[c], hi = ends[c + 1];
      double flo = std::max(p.f(lo), 0.0), fhi = std::max(p.f(hi), 0.0);
      double q = (fhi - flo) / (hi - lo);
      inner.push_back(SqrtAffine{flo - q * lo, q});
      knots.push_back(hi);
    }
  }
  ApproxResult r{assemble(std::move(knots), std::move(inner)), std::move(alloc), std::move(m), 0.0, 0};
  r.bound = 16.0 * r.functional.value / std::pow(static_cast<double>(D), 4.0);
  r.pieces = r.density.nonzero_segments();
  return r;
}

double affine_construction_bound(const FunctionalReport& m1, int D) {
  return m1.value / (16.0 * std::pow(static_cast<double>(D), 4.0));
}

FunctionDensity triangular_density() {
  FunctionDensity d;
  d.pdf = [](double x) { return x >= 0.0 && x <= 1.0 ? 2.0 * (1.0 - x) : 0.0; };
  d.quantile = [](double u) { return 1.0 - std::sqrt(1.0 - u); };
  d.breakpoints = {0.0, 1.0};
  return d;
}

std::vector<MonotonePiece> triangular_sqrt_pieces() {
  return {MonotonePiece{0.0, 1.0, Direction::nonincreasing,
                        [](double x) { return std::sqrt(2.0 * std::max(1.0 - x, 0.0)); }}};
}

namespace {
const double kParabolaC = std::sqrt(15.0 / 16.0);

double parabola_cdf(double x) {
  return 15.0 / 16.0 * (x - 2.0 * x * x * x / 3.0 + std::pow(x, 5.0) / 5.0 + 8.0 / 15.0);
}
} // namespace

FunctionDensity concave_parabola_density() {
  FunctionDensity d;
  d.pdf = [](double x) {
    if (x < -1.0 || x > 1.0) return 0.0;
    double s = kParabolaC * (1.0 - x * x);
    return s * s;
  };
  d.quantile = [](double u) {
    double lo = -1.0, hi = 1.0;
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
      double mid = 0.5 * (lo + hi);
      if (parabola_cdf(mid) < u) lo = mid;
      else hi = mid;
    }
    return 0.5 * (lo + hi);
  };
  d.breakpoints = {-1.0, 1.0};
  return d;
}

std::vector<CurvedPiece> concave_parabola_sqrt_pieces() {
  return {CurvedPiece{-1.0, 1.0, true, [](double x) { return kParabolaC * (1.0 - x * x); },
                      [](double x) { return -2.0 * kParabolaC * x; }}};
}

} // namespace rhoest
