#include "rhoest/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "rhoest/error.hpp"

namespace rhoest::quad {
namespace {

struct Rule {
  std::array<double, kNodes> x{};
  std::array<double, kNodes> w{};
};

// Newton iteration on P_n from the Chebyshev initial guesses.
Rule make_rule() {
  Rule r;
  constexpr int n = kNodes;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16)
        break;
    }
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

const Rule& rule() {
  static const Rule r = make_rule();
  return r;
}

double refine(const std::function<double(double)>& f, double a, double b,
              double whole, double tol, int depth, const QuadratureOptions& opts) {
  double m = 0.5 * (a + b);
  double left = gl32(f, a, m);
  double right = gl32(f, m, b);
  double halves = left + right;
  double slack = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(halves);
  if (std::abs(whole - halves) <= std::max(tol, slack) || !(a < m && m < b))
    return halves;
  if (depth >= opts.max_depth) {
    std::ostringstream os;
    os << "quadrature did not converge on [" << a << ", " << b
       << "]: estimated error " << std::abs(whole - halves) << " > " << tol;
    throw QuadratureError(os.str());
  }
  // Floor on the split tolerance so isolated kinks do not demand sub-ulp accuracy.
  double child = std::max(0.5 * tol, opts.tolerance * 0x1p-20);
  return refine(f, a, m, left, child, depth + 1, opts) +
         refine(f, m, b, right, child, depth + 1, opts);
}

} // namespace

const std::array<double, kNodes>& gl_nodes() { return rule().x; }
const std::array<double, kNodes>& gl_weights() { return rule().w; }

double gl32(const std::function<double(double)>& f, double a, double b) {
  const Rule& r = rule();
  double half = 0.5 * (b - a);
  double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < kNodes; ++i)
    sum += r.w[i] * f(mid + half * r.x[i]);
  return half * sum;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
  if (!(std::isfinite(a) && std::isfinite(b)) || !(a <= b))
    throw InvalidArgument("integrate: interval must be finite with a <= b");
  if (a == b)
    return 0.0;
  return refine(f, a, b, gl32(f, a, b), opts.tolerance, 0, opts);
}

} // namespace rhoest::quad
