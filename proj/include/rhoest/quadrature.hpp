#pragma once

#include <array>
#include <functional>

namespace rhoest {

struct QuadratureOptions {
  // Absolute tolerance per integrated segment.
  double tolerance = 1e-9;
  // Maximum depth of dyadic refinement before giving up.
  int max_depth = 40;
};

namespace quad {

inline constexpr int kNodes = 32;

// Nodes and weights of the 32-point Gauss-Legendre rule on [-1, 1].
const std::array<double, kNodes>& gl_nodes();
const std::array<double, kNodes>& gl_weights();

// Single application of the 32-point rule on [a, b].
double gl32(const std::function<double(double)>& f, double a, double b);

// Compares the rule on [a, b] with the rule on both halves and accepts the
// refined value once they agree to `opts.tolerance` (scaled to the
// sub-interval). Otherwise bisects, up to `opts.max_depth` levels.
// Throws QuadratureError when the depth is exhausted. Requires finite a < b.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

} // namespace quad
} // namespace rhoest
