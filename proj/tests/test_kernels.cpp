#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "rhoest/kernels.hpp"

using namespace rhoest;
namespace k = rhoest::kernels;

namespace {

// Roots as they occur in the rho pass: non-negative, sometimes exactly zero.
std::vector<double> random_roots(std::mt19937_64& rng, std::size_t n) {
  std::vector<double> v(n);
  for (auto& x : v) {
    auto r = rng() % 8;
    x = r == 0 ? 0.0 : 3.0 * unit_variate(rng());
  }
  return v;
}

double naive_psi_sum(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double u = p[i] == 0.0 ? (q[i] == 0.0 ? 1.0 : INFINITY) : q[i] / p[i];
    s += oracle::psi(u);
  }
  return s;
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernel matches the psi oracle") {
  std::mt19937_64 rng(3);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    auto p = random_roots(rng, n), q = random_roots(rng, n);
    CHECK(std::fabs(k::scalar::psi_sum(p.data(), q.data(), n) - naive_psi_sum(p, q)) <=
          1e-12 * (1.0 + n));
  }
}

TEST_CASE("psi_sum is exactly antisymmetric on every available isa") {
  std::mt19937_64 rng(4);
  for (k::Isa isa : {k::Isa::scalar, k::Isa::avx2, k::Isa::neon}) {
    if (!k::isa_available(isa)) continue;
    k::force_isa(isa);
    for (int trial = 0; trial < 50; ++trial) {
      std::size_t n = 1 + rng() % 300;
      auto p = random_roots(rng, n), q = random_roots(rng, n);
      CHECK(k::psi_sum(p, q) == -k::psi_sum(q, p));
    }
  }
  k::force_isa(std::nullopt);
}

TEST_CASE("simd variants agree with the scalar reference") {
  std::mt19937_64 rng(5);
  for (k::Isa isa : {k::Isa::avx2, k::Isa::neon}) {
    if (!k::isa_available(isa)) {
      MESSAGE(std::string(k::isa_name(isa)) << " not available on this machine");
      continue;
    }
    for (int trial = 0; trial < 100; ++trial) {
      std::size_t n = rng() % 513;
      auto p = random_roots(rng, n), q = random_roots(rng, n), w = random_roots(rng, n);
      double ref = k::scalar::psi_sum(p.data(), q.data(), n);
      double ref2 = k::scalar::weighted_sqrt_product(w.data(), p.data(), q.data(), n);
      double got, got2;
      if (isa == k::Isa::avx2) {
        got = k::avx2::psi_sum(p.data(), q.data(), n);
        got2 = k::avx2::weighted_sqrt_product(w.data(), p.data(), q.data(), n);
      } else {
        got = k::neon::psi_sum(p.data(), q.data(), n);
        got2 = k::neon::weighted_sqrt_product(w.data(), p.data(), q.data(), n);
      }
      CHECK(std::fabs(got - ref) <= 1e-12 * (1.0 + n));
      CHECK(std::fabs(got2 - ref2) <= 1e-12 * (1.0 + std::fabs(ref2)));
    }
  }
}

TEST_CASE("weighted_sqrt_product matches a direct sum") {
  std::vector<double> w{0.5, 0.25, 2.0}, a{1.0, 4.0, 0.0}, b{4.0, 1.0, 3.0};
  double want = 0.5 * 2.0 + 0.25 * 2.0 + 0.0;
  CHECK(k::weighted_sqrt_product(w, a, b) == doctest::Approx(want).epsilon(1e-15));
}

TEST_CASE("forcing an unavailable isa is rejected") {
  for (k::Isa isa : {k::Isa::avx2, k::Isa::neon})
    if (!k::isa_available(isa)) CHECK_THROWS(k::force_isa(isa));
  k::force_isa(std::nullopt);
  CHECK(k::isa_available(k::active_isa()));
}

} // TEST_SUITE
