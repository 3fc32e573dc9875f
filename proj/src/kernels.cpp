#include "rhoest/kernels.hpp"

#include <atomic>
#include <cmath>

#include "rhoest/error.hpp"

namespace rhoest::kernels {
namespace {

Isa detect() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2"))
    return Isa::avx2;
#elif defined(__aarch64__)
  return Isa::neon;
#endif
  return Isa::scalar;
}

std::atomic<int> g_forced{-1};

} // namespace

namespace scalar {

double psi_sum(const double* p, const double* q, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double den = std::sqrt(p[i] * p[i] + q[i] * q[i]);
    if (den > 0.0)
      sum += (q[i] - p[i]) / den;
  }
  return sum;
}

double weighted_sqrt_product(const double* w, const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    sum += w[i] * std::sqrt(a[i] * b[i]);
  return sum;
}

} // namespace scalar

const char* isa_name(Isa isa) {
  switch (isa) {
  case Isa::scalar:
    return "scalar";
  case Isa::avx2:
    return "avx2";
  case Isa::neon:
    return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
  case Isa::scalar:
    return true;
  case Isa::avx2:
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
  case Isa::neon:
#if defined(__aarch64__)
    return true;
#else
    return false;
#endif
  }
  return false;
}

Isa active_isa() {
  static const Isa detected = detect();
  int forced = g_forced.load(std::memory_order_relaxed);
  return forced < 0 ? detected : static_cast<Isa>(forced);
}

void force_isa(std::optional<Isa> isa) {
  if (!isa) {
    g_forced.store(-1);
    return;
  }
  if (!isa_available(*isa))
    throw InvalidArgument(std::string("kernel ISA not available: ") + isa_name(*isa));
  g_forced.store(static_cast<int>(*isa));
}

double psi_sum(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw InvalidArgument("psi_sum: length mismatch");
  switch (active_isa()) {
  case Isa::avx2:
    return avx2::psi_sum(p.data(), q.data(), p.size());
  case Isa::neon:
    return neon::psi_sum(p.data(), q.data(), p.size());
  case Isa::scalar:
    break;
  }
  return scalar::psi_sum(p.data(), q.data(), p.size());
}

double weighted_sqrt_product(std::span<const double> w, std::span<const double> a,
                             std::span<const double> b) {
  if (w.size() != a.size() || w.size() != b.size())
    throw InvalidArgument("weighted_sqrt_product: length mismatch");
  switch (active_isa()) {
  case Isa::avx2:
    return avx2::weighted_sqrt_product(w.data(), a.data(), b.data(), w.size());
  case Isa::neon:
    return neon::weighted_sqrt_product(w.data(), a.data(), b.data(), w.size());
  case Isa::scalar:
    break;
  }
  return scalar::weighted_sqrt_product(w.data(), a.data(), b.data(), w.size());
}

} // namespace rhoest::kernels
