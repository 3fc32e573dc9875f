#include "rhoest/vc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "rhoest/error.hpp"

namespace rhoest {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void PiecewiseMonotoneSpec::validate() const {
  if (pieces.empty()) throw InvalidArgument("piecewise monotone spec needs at least one piece");
  if (directions.size() != pieces.size() || endpoints.size() + 1 != pieces.size() ||
      endpoint_values.size() != endpoints.size())
    throw InvalidArgument("piecewise monotone spec: inconsistent sizes");
  for (std::size_t j = 0; j < endpoints.size(); ++j) {
    if (!std::isfinite(endpoints[j]) || !std::isfinite(endpoint_values[j]))
      throw InvalidArgument("piecewise monotone spec: endpoints and their values must be finite");
    if (j > 0 && !(endpoints[j] > endpoints[j - 1]))
      throw InvalidArgument("piecewise monotone spec: endpoints must increase");
  }
  for (const auto& p : pieces)
    if (!p) throw InvalidArgument("piecewise monotone spec: missing evaluator");
}

double PiecewiseMonotoneSpec::operator()(double x) const {
  auto it = std::lower_bound(endpoints.begin(), endpoints.end(), x);
  if (it != endpoints.end() && *it == x)
    return endpoint_values[static_cast<std::size_t>(it - endpoints.begin())];
  return pieces[static_cast<std::size_t>(it - endpoints.begin())](x);
}

namespace {

struct Atom {
  bool empty = true;
  LevelInterval iv;
  bool touches_left = false;  // reaches the lower end of its carrier
  bool touches_right = false; // reaches the upper end of its carrier
};

// Boundary s between where `in` holds and where it fails, for a predicate that
// switches once on (l, r). `in_left` is its value near l; s is on the failing side.
double crossing(const std::function<bool(double)>& in, double l, double r, bool in_left) {
  double lo = l, hi = r;
  if (!std::isfinite(lo)) {
    double base = std::isfinite(r) ? r : 0.0;
    double step = std::isfinite(r) ? 1.0 : 0.0;
    lo = -kInf;
    for (int i = 0; i < 2100; ++i) {
      double x = base - step;
      if (!std::isfinite(x)) break;
      if (in(x) == in_left) {
        lo = x;
        break;
      }
      step = step == 0.0 ? 1.0 : 2.0 * step;
    }
    if (!std::isfinite(lo)) return l;
  }
  if (!std::isfinite(hi)) {
    double step = 1.0;
    for (int i = 0; i < 2100; ++i) {
      double x = lo + step;
      if (!std::isfinite(x)) break;
      if (in(x) != in_left) {
        hi = x;
        break;
      }
      step *= 2.0;
    }
    if (!std::isfinite(hi)) return r;
  }
  for (int i = 0; i < 2000; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (in(mid) == in_left) lo = mid;
    else hi = mid;
  }
  // The point just outside the set, so the boundary can be reported as open.
  return in_left ? hi : lo;
}

Atom piece_atom(const std::function<double(double)>& f, Direction dir, double l, double r,
                double a, bool above) {
  auto in = [&](double x) { return above ? f(x) > a : f(x) <= a; };
  bool in_l = in(l), in_r = in(r); // one-sided limits at the carrier ends
  Atom at;
  // A monotone f meets {f > a} (or {f <= a}) in a prefix or a suffix of (l, r).
  bool prefix = (dir == Direction::nonincreasing) == above;
  if (in_l && in_r) {
    at = {false, {l, r, false, false}, true, true};
    return at;
  }
  if (!in_l && !in_r) return at;
  if (prefix != in_l)
    throw ShapeViolation("level set: piece is not monotone in its declared direction");
  double s = crossing(in, l, r, in_l);
  if (in_l) {
    if (!(s > l)) return at;
    at = {false, {l, s, false, in(s)}, true, false};
  } else {
    if (!(s < r)) return at;
    at = {false, {s, r, in(s), false}, false, true};
  }
  return at;
}

} // namespace

LevelSetResult level_set_intervals(const PiecewiseMonotoneSpec& f, double a, bool above) {
  f.validate();
  const std::size_t k = f.piece_count();
  std::vector<Atom> atoms;
  for (std::size_t j = 0; j < k; ++j) {
    double l = j == 0 ? -kInf : f.endpoints[j - 1];
    double r = j + 1 == k ? kInf : f.endpoints[j];
    atoms.push_back(piece_atom(f.pieces[j], f.directions[j], l, r, a, above));
    if (j + 1 < k) {
      double x = f.endpoints[j];
      double v = f.endpoint_values[j];
      bool in = above ? v > a : v <= a;
      Atom s;
      if (in) s = {false, {x, x, true, true}, true, true};
      atoms.push_back(s);
    }
  }
  LevelSetResult out;
  bool open = false;
  bool prev_touches_right = false;
  for (const Atom& at : atoms) {
    if (at.empty) {
      open = false;
      prev_touches_right = false;
      continue;
    }
    if (open && prev_touches_right && at.touches_left) {
      LevelInterval& cur = out.intervals.back();
      cur.hi = at.iv.hi;
      cur.hi_closed = at.iv.hi_closed;
    } else {
      out.intervals.push_back(at.iv);
      open = true;
    }
    prev_touches_right = at.touches_right;
  }
  out.count = out.intervals.size();
  return out;
}

std::size_t level_set_bound(std::size_t k) { return k + k / 2; }

bool brute_shatter(const SetClassOracle& oracle, std::span<const double> points) {
  const std::size_t m = points.size();
  if (m > 20) throw InvalidArgument("brute_shatter: at most 20 points");
  if (!oracle.contains) throw InvalidArgument("brute_shatter: oracle has no predicate");
  const std::size_t total = std::size_t{1} << m;
  std::vector<char> seen(total, 0);
  std::size_t found = 0;
  for (std::size_t id : oracle.ids) {
    std::size_t mask = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (oracle.contains(id, points[i])) mask |= std::size_t{1} << i;
    if (!seen[mask]) {
      seen[mask] = 1;
      if (++found == total) return true;
    }
  }
  return found == total;
}

SetClassOracle interval_union_oracle(std::span<const double> points, int k) {
  if (k < 1) throw InvalidArgument("interval_union_oracle: k must be >= 1");
  std::vector<double> p(points.begin(), points.end());
  std::sort(p.begin(), p.end());
  std::vector<double> cuts;
  if (!p.empty()) {
    cuts.push_back(p.front() - 1.0);
    for (std::size_t i = 0; i + 1 < p.size(); ++i) cuts.push_back(0.5 * (p[i] + p[i + 1]));
    cuts.push_back(p.back() + 1.0);
  }
  using Iv = std::pair<double, double>;
  std::vector<Iv> base;
  for (std::size_t i = 0; i < cuts.size(); ++i)
    for (std::size_t j = i + 1; j < cuts.size(); ++j) base.emplace_back(cuts[i], cuts[j]);

  auto members = std::make_shared<std::vector<std::vector<Iv>>>();
  members->push_back({}); // empty union
  std::vector<std::size_t> idx;
  // Non-decreasing index tuples of length 1..k over the base intervals.
  for (int len = 1; len <= k; ++len) {
    idx.assign(static_cast<std::size_t>(len), 0);
    while (true) {
      std::vector<Iv> u;
      for (std::size_t i : idx) u.push_back(base[i]);
      members->push_back(std::move(u));
      int pos = len - 1;
      while (pos >= 0 && idx[static_cast<std::size_t>(pos)] + 1 == base.size()) --pos;
      if (pos < 0 || base.empty()) break;
      std::size_t v = ++idx[static_cast<std::size_t>(pos)];
      for (std::size_t q = static_cast<std::size_t>(pos) + 1; q < idx.size(); ++q) idx[q] = v;
    }
  }
  SetClassOracle o;
  for (std::size_t i = 0; i < members->size(); ++i) o.ids.push_back(i);
  o.contains = [members](std::size_t id, double x) {
    for (const Iv& iv : (*members)[id])
      if (iv.first <= x && x <= iv.second) return true;
    return false;
  };
  return o;
}

SetClassOracle power_set_oracle(std::span<const double> points) {
  if (points.size() > 20) throw InvalidArgument("power_set_oracle: at most 20 points");
  auto pts = std::make_shared<std::vector<double>>(points.begin(), points.end());
  SetClassOracle o;
  for (std::size_t mask = 0; mask < (std::size_t{1} << pts->size()); ++mask) o.ids.push_back(mask);
  o.contains = [pts](std::size_t id, double x) {
    for (std::size_t i = 0; i < pts->size(); ++i)
      if ((*pts)[i] == x) return ((id >> i) & 1u) != 0;
    return false;
  };
  return o;
}

SetClassOracle superlevel_oracle(std::vector<std::function<double(double)>> fs,
                                 std::vector<double> levels, double lo, double hi) {
  auto f = std::make_shared<std::vector<std::function<double(double)>>>(std::move(fs));
  auto lv = std::make_shared<std::vector<double>>(std::move(levels));
  SetClassOracle o;
  for (std::size_t i = 0; i < f->size() * lv->size(); ++i) o.ids.push_back(i);
  o.contains = [f, lv, lo, hi](std::size_t id, double x) {
    if (!(x > lo && x <= hi)) return false;
    std::size_t i = id / lv->size(), j = id % lv->size();
    return (*f)[i](x) > (*lv)[j];
  };
  return o;
}

} // namespace rhoest
