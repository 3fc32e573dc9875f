#include "rhoest/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "rhoest/error.hpp"
#include "rhoest/kernels.hpp"

namespace rhoest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double basic_integral(const BasicForm& f, double a, double b) {
  return std::visit(
      overloaded{
          [&](const Constant& c) {
            if (c.c == 0.0)
              return 0.0;
            return c.c * (b - a);
          },
          [&](const SqrtAffine& s) {
            double lo = a;
            double hi = b;
            if (s.q == 0.0)
              return s.p > 0.0 ? s.p * s.p * (b - a) : 0.0;
            double root = -s.p / s.q;
            if (s.q > 0.0)
              lo = std::max(lo, root);
            else
              hi = std::min(hi, root);
            if (!(lo < hi))
              return 0.0;
            if (std::isinf(lo) || std::isinf(hi))
              return kInf;
            double vh = s.p + s.q * hi;
            double vl = s.p + s.q * lo;
            return (vh * vh * vh - vl * vl * vl) / (3.0 * s.q);
          },
          [&](const ExpAffine& e) {
            if (e.beta == 0.0)
              return std::exp(e.alpha) * (b - a);
            if (std::isinf(a) && std::isinf(b))
              return kInf;
            if (std::isinf(a)) {
              if (e.beta < 0.0)
                return kInf;
              return std::exp(e.alpha + e.beta * b) / e.beta;
            }
            if (std::isinf(b)) {
              if (e.beta > 0.0)
                return kInf;
              return -std::exp(e.alpha + e.beta * a) / e.beta;
            }
            return std::exp(e.alpha + e.beta * a) * std::expm1(e.beta * (b - a)) / e.beta;
          }},
      f);
}

BasicForm scale_basic(const BasicForm& f, double s) {
  return std::visit(overloaded{[&](const Constant& c) -> BasicForm { return Constant{c.c * s}; },
                               [&](const SqrtAffine& a) -> BasicForm {
                                 double r = std::sqrt(s);
                                 return SqrtAffine{a.p * r, a.q * r};
                               },
                               [&](const ExpAffine& e) -> BasicForm {
                                 return ExpAffine{e.alpha + std::log(s), e.beta};
                               }},
                    f);
}

Form scale_form(const Form& f, double s) {
  if (const auto* sum = std::get_if<SumForm>(&f)) {
    SumForm out = *sum;
    for (auto& t : out.terms)
      t.weight *= s;
    return out;
  }
  BasicForm basic = std::visit(
      overloaded{[](const SumForm&) -> BasicForm { return Constant{0.0}; },
                 [](const auto& b) -> BasicForm { return b; }},
      f);
  return std::visit([](auto&& x) -> Form { return x; }, scale_basic(basic, s));
}

std::string segment_name(std::size_t j, double lo, double hi) {
  std::ostringstream os;
  os << "segment " << j << " (" << lo << ", " << hi << "]";
  return os.str();
}

void validate_basic(const BasicForm& f, double lo, double hi, const std::string& where) {
  std::visit(overloaded{
                 [&](const Constant& c) {
                   if (!std::isfinite(c.c) || c.c < 0.0)
                     throw InvalidArgument(where + ": constant must be finite and >= 0");
                   if ((std::isinf(lo) || std::isinf(hi)) && c.c != 0.0)
                     throw InvalidArgument(where + ": unbounded constant segment must be 0");
                 },
                 [&](const SqrtAffine& s) {
                   if (!std::isfinite(s.p) || !std::isfinite(s.q))
                     throw InvalidArgument(where + ": sqrt_affine parameters must be finite");
                   if (std::isinf(lo) || std::isinf(hi))
                     throw InvalidArgument(where + ": sqrt_affine segment must be bounded");
                 },
                 [&](const ExpAffine& e) {
                   if (!std::isfinite(e.alpha) || !std::isfinite(e.beta))
                     throw InvalidArgument(where + ": exp_affine parameters must be finite");
                   if (std::isinf(lo) && !(e.beta > 0.0))
                     throw InvalidArgument(where + ": left tail needs exp_affine slope > 0");
                   if (std::isinf(hi) && !(e.beta < 0.0))
                     throw InvalidArgument(where + ": right tail needs exp_affine slope < 0");
                 }},
             f);
}

void validate_form(const Form& f, double lo, double hi, const std::string& where) {
  if (const auto* sum = std::get_if<SumForm>(&f)) {
    for (const auto& t : sum->terms) {
      if (!std::isfinite(t.weight) || t.weight < 0.0)
        throw InvalidArgument(where + ": sum weights must be finite and >= 0");
      validate_basic(t.form, lo, hi, where);
    }
    return;
  }
  std::visit(overloaded{[](const SumForm&) {},
                        [&](const auto& b) { validate_basic(BasicForm{b}, lo, hi, where); }},
             f);
}

double validate_and_mass(const Partition& p, const std::vector<Form>& forms) {
  if (forms.size() != p.interval_count()) {
    std::ostringstream os;
    os << "expected " << p.interval_count() << " segments for " << p.endpoint_count()
       << " knots, got " << forms.size();
    throw InvalidArgument(os.str());
  }
  double mass = 0.0;
  for (std::size_t j = 0; j < forms.size(); ++j) {
    auto [lo, hi] = p.interval(j);
    validate_form(forms[j], lo, hi, segment_name(j, lo, hi));
    double m = form_integral(forms[j], lo, hi);
    if (!std::isfinite(m))
      throw InvalidArgument(segment_name(j, lo, hi) + ": integral diverges");
    mass += m;
  }
  return mass;
}

// Constant or a single exponential term, as exp(alpha + beta x).
std::optional<ExpAffine> as_exp(const Form& f) {
  if (const auto* c = std::get_if<Constant>(&f)) {
    if (c->c > 0.0)
      return ExpAffine{std::log(c->c), 0.0};
    return std::nullopt;
  }
  if (const auto* e = std::get_if<ExpAffine>(&f))
    return *e;
  if (const auto* s = std::get_if<SumForm>(&f)) {
    if (s->terms.size() != 1 || !(s->terms[0].weight > 0.0))
      return std::nullopt;
    const auto& t = s->terms[0];
    if (const auto* c = std::get_if<Constant>(&t.form)) {
      if (c->c > 0.0)
        return ExpAffine{std::log(c->c * t.weight), 0.0};
      return std::nullopt;
    }
    if (const auto* e = std::get_if<ExpAffine>(&t.form))
      return ExpAffine{e->alpha + std::log(t.weight), e->beta};
  }
  return std::nullopt;
}

void collect_roots(const BasicForm& f, double lo, double hi, std::vector<double>& out) {
  if (const auto* s = std::get_if<SqrtAffine>(&f)) {
    if (s->q != 0.0) {
      double r = -s->p / s->q;
      if (r > lo && r < hi)
        out.push_back(r);
    }
  }
}

void collect_roots(const Form& f, double lo, double hi, std::vector<double>& out) {
  if (const auto* s = std::get_if<SumForm>(&f)) {
    for (const auto& t : s->terms)
      collect_roots(t.form, lo, hi, out);
    return;
  }
  std::visit(overloaded{[](const SumForm&) {},
                        [&](const auto& b) { collect_roots(BasicForm{b}, lo, hi, out); }},
             f);
}

// Moves an infinite end of (lo, hi] inward until the neglected mass of both
// forms is below `eps`.
std::pair<double, double> truncate_tails(const Form& a, const Form& b, double lo, double hi,
                                         double eps) {
  auto tail = [&](double x0, double x1) {
    return form_integral(a, x0, x1) + form_integral(b, x0, x1);
  };
  if (std::isinf(lo)) {
    double step = 1.0;
    double x = hi - step;
    while (tail(-kInf, x) > eps && step < 1e300) {
      step *= 2.0;
      x = hi - step;
    }
    lo = x;
  }
  if (std::isinf(hi)) {
    double step = 1.0;
    double x = lo + step;
    while (tail(x, kInf) > eps && step < 1e300) {
      step *= 2.0;
      x = lo + step;
    }
    hi = x;
  }
  return {lo, hi};
}

double integrate_pieces(const std::function<double(double)>& g, double lo, double hi,
                        std::vector<double> cuts, const QuadratureOptions& opts) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    sum += quad::integrate(g, cuts[i], cuts[i + 1], opts);
  return sum;
}

double cell_affinity(const Form& ft, const Form& fu, double lo, double hi,
                     const QuadratureOptions& opts) {
  if (form_is_zero(ft) || form_is_zero(fu))
    return 0.0;
  auto et = as_exp(ft);
  auto eu = as_exp(fu);
  if (et && eu) {
    ExpAffine g{0.5 * (et->alpha + eu->alpha), 0.5 * (et->beta + eu->beta)};
    return basic_integral(g, lo, hi);
  }
  if (std::isinf(lo) || std::isinf(hi))
    std::tie(lo, hi) = truncate_tails(ft, fu, lo, hi, 1e-17);
  std::vector<double> cuts;
  collect_roots(ft, lo, hi, cuts);
  collect_roots(fu, lo, hi, cuts);
  auto g = [&](double x) { return std::sqrt(form_value(ft, x) * form_value(fu, x)); };
  return integrate_pieces(g, lo, hi, std::move(cuts), opts);
}

void append_terms(const Form& f, double w, std::vector<WeightedTerm>& out) {
  if (const auto* s = std::get_if<SumForm>(&f)) {
    for (const auto& t : s->terms)
      out.push_back({t.weight * w, t.form});
    return;
  }
  std::visit(overloaded{[](const SumForm&) {},
                        [&](const auto& b) { out.push_back({w, BasicForm{b}}); }},
             f);
}

Form mix_half(const Form& a, const Form& b) {
  const auto* ca = std::get_if<Constant>(&a);
  const auto* cb = std::get_if<Constant>(&b);
  if (ca && cb)
    return Constant{(ca->c + cb->c) * 0.5};
  SumForm s;
  if (!form_is_zero(a))
    append_terms(a, 0.5, s.terms);
  if (!form_is_zero(b))
    append_terms(b, 0.5, s.terms);
  if (s.terms.empty())
    return Constant{0.0};
  return s;
}

// Inverts m = integral of f over (lo, x] for x in (lo, hi].
double invert_segment(const Form& f, double lo, double hi, double m) {
  if (const auto* c = std::get_if<Constant>(&f))
    return std::min(hi, lo + m / c->c);
  if (const auto* e = std::get_if<ExpAffine>(&f)) {
    double x;
    if (e->beta == 0.0) {
      x = lo + m / std::exp(e->alpha);
    } else {
      double base = std::isinf(lo) ? 0.0 : std::exp(e->alpha + e->beta * lo);
      double inner = base + e->beta * m;
      if (!(inner > 0.0))
        return hi;
      x = (std::log(inner) - e->alpha) / e->beta;
    }
    if (!std::isinf(lo))
      x = std::max(x, lo);
    return std::min(x, hi);
  }
  // Bisection on the cumulative integral.
  double a = lo;
  double b = hi;
  if (std::isinf(a)) {
    double step = 1.0;
    a = b - step;
    while (form_integral(f, -kInf, a) > m && step < 1e300) {
      step *= 2.0;
      a = b - step;
    }
    m -= form_integral(f, -kInf, a);
    lo = a;
  }
  if (std::isinf(b)) {
    double step = 1.0;
    b = a + step;
    while (form_integral(f, a, b) < m && step < 1e300) {
      step *= 2.0;
      b = a + step;
    }
  }
  for (int it = 0; it < 400 && b - a > 1e-12; ++it) {
    double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b)
      break;
    if (form_integral(f, lo, mid) < m)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

} // namespace

// ---------------------------------------------------------------------------

double form_value(const BasicForm& f, double x) {
  return std::visit(overloaded{[](const Constant& c) { return c.c; },
                               [&](const SqrtAffine& s) {
                                 double r = std::max(s.p + s.q * x, 0.0);
                                 return r * r;
                               },
                               [&](const ExpAffine& e) { return std::exp(e.alpha + e.beta * x); }},
                    f);
}

double form_value(const Form& f, double x) {
  if (const auto* s = std::get_if<SumForm>(&f)) {
    double v = 0.0;
    for (const auto& t : s->terms)
      v += t.weight * form_value(t.form, x);
    return v;
  }
  return std::visit(overloaded{[](const SumForm&) { return 0.0; },
                               [&](const auto& b) { return form_value(BasicForm{b}, x); }},
                    f);
}

double form_integral(const Form& f, double a, double b) {
  if (!(a < b))
    return 0.0;
  if (const auto* s = std::get_if<SumForm>(&f)) {
    double v = 0.0;
    for (const auto& t : s->terms)
      if (t.weight != 0.0)
        v += t.weight * basic_integral(t.form, a, b);
    return v;
  }
  return std::visit(overloaded{[](const SumForm&) { return 0.0; },
                               [&](const auto& bf) { return basic_integral(BasicForm{bf}, a, b); }},
                    f);
}

bool form_is_zero(const Form& f) {
  if (const auto* c = std::get_if<Constant>(&f))
    return c->c == 0.0;
  if (const auto* s = std::get_if<SumForm>(&f)) {
    for (const auto& t : s->terms) {
      if (t.weight == 0.0)
        continue;
      const auto* c = std::get_if<Constant>(&t.form);
      if (!c || c->c != 0.0)
        return false;
    }
    return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

Partition::Partition(std::vector<double> endpoints) : endpoints_(std::move(endpoints)) {
  for (std::size_t i = 0; i < endpoints_.size(); ++i) {
    if (!std::isfinite(endpoints_[i]))
      throw InvalidArgument("partition endpoints must be finite");
    if (i > 0 && !(endpoints_[i - 1] < endpoints_[i]))
      throw InvalidArgument("partition endpoints must be strictly increasing");
  }
}

std::pair<double, double> Partition::interval(std::size_t j) const {
  double lo = j == 0 ? -kInf : endpoints_[j - 1];
  double hi = j == endpoints_.size() ? kInf : endpoints_[j];
  return {lo, hi};
}

std::size_t Partition::locate(double x) const {
  return static_cast<std::size_t>(std::lower_bound(endpoints_.begin(), endpoints_.end(), x) -
                                  endpoints_.begin());
}

Partition Partition::join(const Partition& other) const {
  std::vector<double> merged;
  merged.reserve(endpoints_.size() + other.endpoints_.size());
  std::set_union(endpoints_.begin(), endpoints_.end(), other.endpoints_.begin(),
                 other.endpoints_.end(), std::back_inserter(merged));
  Partition out;
  out.endpoints_ = std::move(merged);
  return out;
}

bool Partition::refines(const Partition& other) const {
  return std::includes(endpoints_.begin(), endpoints_.end(), other.endpoints_.begin(),
                       other.endpoints_.end());
}

// ---------------------------------------------------------------------------

PiecewiseFunction::PiecewiseFunction(Partition partition, std::vector<Form> forms)
    : partition_(std::move(partition)), forms_(std::move(forms)) {
  mass_ = validate_and_mass(partition_, forms_);
}

Segment PiecewiseFunction::segment(std::size_t j) const {
  auto [lo, hi] = partition_.interval(j);
  return {lo, hi, &forms_[j]};
}

double PiecewiseFunction::operator()(double x) const {
  if (std::isnan(x))
    throw InvalidArgument("cannot evaluate at NaN");
  return form_value(forms_[partition_.locate(x)], x);
}

PiecewiseDensity::PiecewiseDensity(Partition partition, std::vector<Form> forms)
    : PiecewiseDensity(PiecewiseFunction(std::move(partition), std::move(forms))) {}

PiecewiseDensity::PiecewiseDensity(PiecewiseFunction f)
    : partition_(std::move(f.partition_)), forms_(std::move(f.forms_)) {
  double mass = f.mass_;
  if (!(mass > 0.0))
    throw DegenerateInput("density has zero mass");
  if (std::abs(mass - 1.0) > 1e-12) {
    for (auto& form : forms_)
      if (!form_is_zero(form))
        form = scale_form(form, 1.0 / mass);
  }
  build();
}

void PiecewiseDensity::build() {
  cum_.assign(forms_.size() + 1, 0.0);
  for (std::size_t j = 0; j < forms_.size(); ++j) {
    auto [lo, hi] = partition_.interval(j);
    cum_[j + 1] = cum_[j] + form_integral(forms_[j], lo, hi);
  }
  if (std::abs(cum_.back() - 1.0) > 1e-9)
    throw DegenerateInput("normalization failed");
}

Segment PiecewiseDensity::segment(std::size_t j) const {
  auto [lo, hi] = partition_.interval(j);
  return {lo, hi, &forms_[j]};
}

double PiecewiseDensity::operator()(double x) const {
  if (std::isnan(x))
    throw InvalidArgument("cannot evaluate a density at NaN");
  return form_value(forms_[partition_.locate(x)], x);
}

double PiecewiseDensity::cdf(double x) const {
  if (std::isnan(x))
    throw InvalidArgument("cannot evaluate a CDF at NaN");
  std::size_t j = partition_.locate(x);
  auto [lo, hi] = partition_.interval(j);
  return std::min(1.0, cum_[j] + form_integral(forms_[j], lo, x));
}

double PiecewiseDensity::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0))
    throw InvalidArgument("quantile level must lie in (0, 1)");
  double target = u * cum_.back();
  auto it = std::lower_bound(cum_.begin() + 1, cum_.end(), target);
  if (it == cum_.end())
    --it;
  std::size_t j = static_cast<std::size_t>(it - cum_.begin()) - 1;
  while (j > 0 && cum_[j + 1] - cum_[j] <= 0.0)
    --j;
  auto [lo, hi] = partition_.interval(j);
  double m = std::min(target - cum_[j], cum_[j + 1] - cum_[j]);
  return invert_segment(forms_[j], lo, hi, m);
}

std::pair<double, double> PiecewiseDensity::support() const {
  std::size_t first = forms_.size();
  std::size_t last = 0;
  for (std::size_t j = 0; j < forms_.size(); ++j) {
    if (!form_is_zero(forms_[j])) {
      first = std::min(first, j);
      last = j;
    }
  }
  return {partition_.interval(first).first, partition_.interval(last).second};
}

std::size_t PiecewiseDensity::nonzero_segments() const {
  return static_cast<std::size_t>(
      std::count_if(forms_.begin(), forms_.end(), [](const Form& f) { return !form_is_zero(f); }));
}

// ---------------------------------------------------------------------------

Sample::Sample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 3)
    throw InvalidArgument("a sample needs at least 3 observations");
  for (double v : values_)
    if (!std::isfinite(v))
      throw InvalidArgument("sample values must be finite");
  std::sort(values_.begin(), values_.end());
}

// ---------------------------------------------------------------------------

namespace {

bool all_constant(const PiecewiseDensity& d) {
  return std::all_of(d.forms().begin(), d.forms().end(),
                     [](const Form& f) { return std::holds_alternative<Constant>(f); });
}

// Histogram pairs: lengths and heights on the bounded joined cells, reduced
// by the SIMD kernel.
double constant_affinity(const PiecewiseDensity& t, const PiecewiseDensity& u,
                         const Partition& joined) {
  std::size_t cells = joined.endpoint_count() == 0 ? 0 : joined.endpoint_count() - 1;
  std::vector<double> len(cells), ct(cells), cu(cells);
  for (std::size_t j = 0; j < cells; ++j) {
    auto [lo, hi] = joined.interval(j + 1);
    len[j] = hi - lo;
    ct[j] = std::get<Constant>(t.forms()[t.partition().locate(hi)]).c;
    cu[j] = std::get<Constant>(u.forms()[u.partition().locate(hi)]).c;
  }
  return kernels::weighted_sqrt_product(len, ct, cu);
}

} // namespace

double affinity(const PiecewiseDensity& t, const PiecewiseDensity& u,
                const QuadratureOptions& opts) {
  Partition joined = t.partition().join(u.partition());
  if (all_constant(t) && all_constant(u))
    return constant_affinity(t, u, joined);
  double sum = 0.0;
  for (std::size_t j = 0; j < joined.interval_count(); ++j) {
    auto [lo, hi] = joined.interval(j);
    const Form& ft = t.forms()[t.partition().locate(hi)];
    const Form& fu = u.forms()[u.partition().locate(hi)];
    sum += cell_affinity(ft, fu, lo, hi, opts);
  }
  return sum;
}

double hellinger2(const PiecewiseDensity& t, const PiecewiseDensity& u,
                  const QuadratureOptions& opts) {
  double h2 = 0.5 * (t.total_mass() + u.total_mass()) - affinity(t, u, opts);
  return std::clamp(h2, 0.0, 1.0);
}

PiecewiseDensity normalize_sqrt(const PiecewiseFunction& f2) {
  if (!(f2.mass() > 0.0))
    throw DegenerateInput("normalize_sqrt: f is identically zero");
  return PiecewiseDensity(f2);
}

PiecewiseDensity mixture_half(const PiecewiseDensity& t, const PiecewiseDensity& u) {
  Partition joined = t.partition().join(u.partition());
  std::vector<Form> forms;
  forms.reserve(joined.interval_count());
  for (std::size_t j = 0; j < joined.interval_count(); ++j) {
    double hi = joined.interval(j).second;
    forms.push_back(mix_half(t.forms()[t.partition().locate(hi)],
                             u.forms()[u.partition().locate(hi)]));
  }
  return PiecewiseDensity(std::move(joined), std::move(forms));
}

double unit_variate(std::uint64_t word) {
  return (static_cast<double>(word >> 12) + 0.5) * 0x1p-52;
}

Sample sample(const PiecewiseDensity& d, std::size_t n, std::uint64_t seed) {
  if (n < 3)
    throw InvalidArgument("sample size must be at least 3");
  std::mt19937_64 rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs)
    x = d.quantile(unit_variate(rng()));
  return Sample(std::move(xs));
}

// ---------------------------------------------------------------------------

double hellinger2(const FunctionDensity& t, const PiecewiseDensity& u,
                  const QuadratureOptions& opts) {
  if (t.breakpoints.size() < 2)
    throw InvalidArgument("function density needs at least its two support ends");
  std::vector<double> cuts = t.breakpoints;
  std::sort(cuts.begin(), cuts.end());
  double lo = cuts.front();
  double hi = cuts.back();
  for (double x : u.partition().endpoints())
    if (x > lo && x < hi)
      cuts.push_back(x);
  for (std::size_t j = 0; j < u.segment_count(); ++j) {
    auto seg = u.segment(j);
    collect_roots(*seg.form, std::max(seg.lo, lo), std::min(seg.hi, hi), cuts);
  }
  auto g = [&](double x) { return std::sqrt(t.pdf(x) * u(x)); };
  double aff = integrate_pieces(g, lo, hi, cuts, opts);
  double mass_t = integrate_pieces(t.pdf, lo, hi, t.breakpoints, opts);
  double h2 = 0.5 * (mass_t + u.total_mass()) - aff;
  return std::clamp(h2, 0.0, 1.0);
}

Sample sample(const FunctionDensity& d, std::size_t n, std::uint64_t seed) {
  if (n < 3)
    throw InvalidArgument("sample size must be at least 3");
  std::mt19937_64 rng(seed);
  std::vector<double> xs(n);
  for (auto& x : xs)
    x = d.quantile(unit_variate(rng()));
  return Sample(std::move(xs));
}

PiecewiseDensity uniform_density(double a, double b) {
  if (!(a < b))
    throw InvalidArgument("uniform density needs a < b");
  return PiecewiseDensity(Partition({a, b}), {Constant{0.0}, Constant{1.0 / (b - a)}, Constant{0.0}});
}

PiecewiseDensity histogram_density(std::vector<double> knots, std::vector<double> heights) {
  if (knots.size() != heights.size() + 1)
    throw InvalidArgument("histogram needs one more knot than heights");
  std::vector<Form> forms;
  forms.reserve(heights.size() + 2);
  forms.push_back(Constant{0.0});
  for (double h : heights)
    forms.push_back(Constant{h});
  forms.push_back(Constant{0.0});
  return PiecewiseDensity(Partition(std::move(knots)), std::move(forms));
}

} // namespace rhoest
