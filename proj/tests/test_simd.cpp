#include <doctest.h>

#include <cmath>
#include <vector>

#include "diffquad/rng.hpp"
#include "diffquad/simd.hpp"

using namespace diffquad;
using simd::Isa;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

std::vector<Isa> vector_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (simd::isa_available(isa)) out.push_back(isa);
  }
  return out;
}

void check_close(double a, double b, double scale) { CHECK(std::abs(a - b) <= 1e-13 * (1.0 + scale)); }

}  // namespace

TEST_CASE("scalar table is always available and selectable") {
  CHECK(simd::isa_available(Isa::scalar));
  const Isa before = simd::active_isa();
  simd::set_active_isa(Isa::scalar);
  CHECK(simd::active_isa() == Isa::scalar);
  simd::set_active_isa(before);
}

TEST_CASE("vector kernels match the scalar reference on ragged lengths") {
  const auto& ref = simd::scalar::table();
  Rng rng(11);
  for (Isa isa : vector_isas()) {
    CAPTURE(simd::to_string(isa));
    const auto& vec = simd::table_for(isa);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 67u, 1000u}) {
      CAPTURE(n);
      const auto a = random_vector(rng, n), b = random_vector(rng, n), w = random_vector(rng, n);
      const double scale = static_cast<double>(n);
      check_close(vec.dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), scale);
      check_close(vec.weighted_dot(w.data(), a.data(), b.data(), n), ref.weighted_dot(w.data(), a.data(), b.data(), n),
                  scale);
      CHECK(vec.max_abs(a.data(), n) == ref.max_abs(a.data(), n));
      check_close(vec.abs_sum(a.data(), n), ref.abs_sum(a.data(), n), scale);

      auto y1 = b, y2 = b;
      vec.axpy(0.37, a.data(), y1.data(), n);
      ref.axpy(0.37, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], 1.0);
    }
    for (std::size_t rows : {1u, 3u, 8u, 13u}) {
      for (std::size_t cols : {1u, 4u, 5u, 9u, 33u}) {
        CAPTURE(rows);
        CAPTURE(cols);
        const auto A = random_vector(rng, rows * cols);
        const auto x = random_vector(rng, cols), xr = random_vector(rng, rows);
        std::vector<double> y1(rows), y2(rows);
        vec.gemv(A.data(), rows, cols, x.data(), y1.data());
        ref.gemv(A.data(), rows, cols, x.data(), y2.data());
        for (std::size_t i = 0; i < rows; ++i) check_close(y1[i], y2[i], static_cast<double>(cols));
        std::vector<double> z1(cols, 0.5), z2(cols, 0.5);  // gemv_t accumulates
        vec.gemv_t(A.data(), rows, cols, xr.data(), z1.data());
        ref.gemv_t(A.data(), rows, cols, xr.data(), z2.data());
        for (std::size_t i = 0; i < cols; ++i) check_close(z1[i], z2[i], static_cast<double>(rows));
      }
    }
  }
}

TEST_CASE("scalar reference agrees with naive loops") {
  const auto& ref = simd::scalar::table();
  Rng rng(3);
  const auto a = random_vector(rng, 37), b = random_vector(rng, 37);
  double d = 0.0, m = 0.0, s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += a[i] * b[i];
    m = std::max(m, std::abs(a[i]));
    s += std::abs(a[i]);
  }
  CHECK(ref.dot(a.data(), b.data(), a.size()) == doctest::Approx(d).epsilon(1e-14));
  CHECK(ref.max_abs(a.data(), a.size()) == m);
  CHECK(ref.abs_sum(a.data(), a.size()) == doctest::Approx(s).epsilon(1e-14));
}

TEST_CASE("unavailable ISA is rejected") {
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (!simd::isa_available(isa)) CHECK_THROWS(simd::set_active_isa(isa));
  }
}
