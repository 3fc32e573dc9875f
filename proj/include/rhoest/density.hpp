#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "rhoest/quadrature.hpp"

namespace rhoest {

// ---------------------------------------------------------------------------
// Segment forms
// ---------------------------------------------------------------------------

// t(x) = c on the segment.
struct Constant {
  double c = 0.0;
};

// sqrt(t(x)) = max(p + q x, 0) on the segment.
struct SqrtAffine {
  double p = 0.0;
  double q = 0.0;
};

// t(x) = exp(alpha + beta x) on the segment.
struct ExpAffine {
  double alpha = 0.0;
  double beta = 0.0;
};

using BasicForm = std::variant<Constant, SqrtAffine, ExpAffine>;

struct WeightedTerm {
  double weight = 1.0;
  BasicForm form;
};

// Pointwise sum of weighted basic forms. Produced by mixing densities whose
// segments do not share a closed form; never serialized.
struct SumForm {
  std::vector<WeightedTerm> terms;
};

using Form = std::variant<Constant, SqrtAffine, ExpAffine, SumForm>;

double form_value(const BasicForm& f, double x);
double form_value(const Form& f, double x);
// Integral of the form over (a, b]; a may be -inf and b may be +inf.
double form_integral(const Form& f, double a, double b);
// True when the form is identically zero (Constant(0) or an empty sum).
bool form_is_zero(const Form& f);

// ---------------------------------------------------------------------------
// Partition
// ---------------------------------------------------------------------------

// Ordered endpoints x_1 < ... < x_k splitting the line into k + 1 intervals
// I_0 = (-inf, x_1], ..., I_k = (x_k, +inf). Densities attach to intervals
// left-open and right-closed.
class Partition {
public:
  Partition() = default;
  // Throws InvalidArgument on non-finite, unsorted or duplicated endpoints.
  explicit Partition(std::vector<double> endpoints);

  std::span<const double> endpoints() const { return endpoints_; }
  std::size_t endpoint_count() const { return endpoints_.size(); }
  std::size_t interval_count() const { return endpoints_.size() + 1; }
  // Bounds (lo, hi] of interval j, with infinities for the two outer ones.
  std::pair<double, double> interval(std::size_t j) const;
  // Index of the interval containing x under the (lo, hi] convention.
  std::size_t locate(double x) const;

  Partition join(const Partition& other) const;
  bool refines(const Partition& other) const;

  bool operator==(const Partition&) const = default;

private:
  std::vector<double> endpoints_;
};

// ---------------------------------------------------------------------------
// Piecewise functions and densities
// ---------------------------------------------------------------------------

struct Segment {
  double lo;
  double hi;
  const Form* form;
};

// Non-negative integrable function with one form per partition interval,
// not necessarily of unit mass.
class PiecewiseFunction {
public:
  PiecewiseFunction(Partition partition, std::vector<Form> forms);

  const Partition& partition() const { return partition_; }
  std::span<const Form> forms() const { return forms_; }
  std::size_t segment_count() const { return forms_.size(); }
  Segment segment(std::size_t j) const;
  double mass() const { return mass_; }
  double operator()(double x) const;

private:
  friend class PiecewiseDensity;
  Partition partition_;
  std::vector<Form> forms_;
  double mass_ = 0.0;
};

class PiecewiseDensity {
public:
  // Validates the forms and rescales to unit mass when the mass is off by
  // more than 1e-12. Throws DegenerateInput for zero mass.
  PiecewiseDensity(Partition partition, std::vector<Form> forms);
  explicit PiecewiseDensity(PiecewiseFunction f);

  const Partition& partition() const { return partition_; }
  std::span<const Form> forms() const { return forms_; }
  std::size_t segment_count() const { return forms_.size(); }
  Segment segment(std::size_t j) const;
  double total_mass() const { return cum_.back(); }

  // t(x). Throws InvalidArgument for NaN.
  double operator()(double x) const;
  double cdf(double x) const;
  // Inverse CDF for u in (0, 1).
  double quantile(double u) const;

  // Closure of the region carrying mass: first and last endpoint of a
  // non-zero segment (may be infinite).
  std::pair<double, double> support() const;
  // Number of segments that are not identically zero.
  std::size_t nonzero_segments() const;

private:
  void build();

  Partition partition_;
  std::vector<Form> forms_;
  std::vector<double> cum_; // cum_[j] = mass of segments < j; size = segments + 1
};

// ---------------------------------------------------------------------------
// Samples
// ---------------------------------------------------------------------------

class Sample {
public:
  // Sorts the values. Requires at least 3 finite values.
  explicit Sample(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }

private:
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

inline double eval(const PiecewiseDensity& d, double x) { return d(x); }

// Integral of sqrt(t u) over the line.
double affinity(const PiecewiseDensity& t, const PiecewiseDensity& u,
                const QuadratureOptions& opts = {});

// Squared Hellinger distance, clamped to [0, 1].
double hellinger2(const PiecewiseDensity& t, const PiecewiseDensity& u,
                  const QuadratureOptions& opts = {});

// Builds u = (f / ||f||)^2 where f is the non-negative square root of `f2`,
// i.e. `f2` carries the squares of f in the density forms. Throws
// DegenerateInput when f is identically zero.
PiecewiseDensity normalize_sqrt(const PiecewiseFunction& f2);

// (t + u) / 2 on the joined partition.
PiecewiseDensity mixture_half(const PiecewiseDensity& t, const PiecewiseDensity& u);

// Map of a uniform variate to the density's quantile.
inline double inverse_cdf(const PiecewiseDensity& d, double u) { return d.quantile(u); }

// Uniform variate in (0, 1) from the top 53 bits of a 64-bit word.
double unit_variate(std::uint64_t word);

// n i.i.d. draws by inverse CDF from a mt19937_64 stream seeded with `seed`.
Sample sample(const PiecewiseDensity& d, std::size_t n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Densities known only through evaluators
// ---------------------------------------------------------------------------

// A density on a bounded support given by its pdf and quantile function.
// `breakpoints` are the points (including both support ends) where the pdf
// may be non-smooth.
struct FunctionDensity {
  std::function<double(double)> pdf;
  std::function<double(double)> quantile;
  std::vector<double> breakpoints;
};

double hellinger2(const FunctionDensity& t, const PiecewiseDensity& u,
                  const QuadratureOptions& opts = {});

Sample sample(const FunctionDensity& d, std::size_t n, std::uint64_t seed);

// Named reference densities.
PiecewiseDensity uniform_density(double a, double b);
// Histogram with heights proportional to `weights` on consecutive cells
// delimited by `knots` (size = weights + 1); zero outside.
PiecewiseDensity histogram_density(std::vector<double> knots, std::vector<double> weights);

} // namespace rhoest
