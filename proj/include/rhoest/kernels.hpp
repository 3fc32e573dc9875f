#pragma once

// Data-parallel inner loops of the rho criterion. Each kernel has a scalar
// reference implementation plus AVX2 (x86-64) and NEON (aarch64) variants;
// the variant is picked once at runtime from the CPU features.

#include <cstddef>
#include <optional>
#include <span>

namespace rhoest::kernels {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);
bool isa_available(Isa isa);
// Best available ISA, or the forced one.
Isa active_isa();
// Pins the dispatch to `isa` (tests, benchmarks). std::nullopt restores
// automatic selection. Throws InvalidArgument when the ISA is unavailable.
void force_isa(std::optional<Isa> isa);

// sum_i psi(q_i / p_i) with psi(u) = (u - 1) / sqrt(1 + u^2), written as
// (q_i - p_i) / sqrt(p_i^2 + q_i^2). Terms with p_i = q_i = 0 contribute
// psi(1) = 0 and p_i = 0 < q_i gives psi(+inf) = 1. Here p = sqrt(t(X_i)) and
// q = sqrt(t'(X_i)). Exactly antisymmetric under swapping p and q.
double psi_sum(std::span<const double> p, std::span<const double> q);

// sum_i w_i sqrt(a_i b_i); symmetric in a and b.
double weighted_sqrt_product(std::span<const double> w, std::span<const double> a,
                             std::span<const double> b);

namespace scalar {
double psi_sum(const double* p, const double* q, std::size_t n);
double weighted_sqrt_product(const double* w, const double* a, const double* b, std::size_t n);
} // namespace scalar

namespace avx2 {
double psi_sum(const double* p, const double* q, std::size_t n);
double weighted_sqrt_product(const double* w, const double* a, const double* b, std::size_t n);
} // namespace avx2

namespace neon {
double psi_sum(const double* p, const double* q, std::size_t n);
double weighted_sqrt_product(const double* w, const double* a, const double* b, std::size_t n);
} // namespace neon

} // namespace rhoest::kernels
