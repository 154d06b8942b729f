#pragma once

// Data-parallel inner loops used by the kernel sums, spectral evaluation and
// the quadratic-program gradient. Every routine has a portable scalar
// reference in diffquad::simd::scalar; vector variants (AVX2+FMA on x86-64,
// NEON on aarch64) are chosen once at startup from the running CPU.
//
// Vector variants reassociate sums, so they agree with the scalar reference
// only up to rounding. Results are deterministic for a fixed ISA.

#include <cstddef>
#include <span>
#include <string_view>

namespace diffquad::simd {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*weighted_dot)(const double* w, const double* a, const double* b, std::size_t n);
  // y[r] = sum_c A[r*cols + c] * x[c]
  void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y[c] += sum_r x[r] * A[r*cols + c]
  void (*gemv_t)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*max_abs)(const double* a, std::size_t n);
  double (*abs_sum)(const double* a, std::size_t n);
};

namespace scalar {
const KernelTable& table();
}
#if defined(DIFFQUAD_HAVE_AVX2)
namespace avx2 {
const KernelTable& table();
}
#endif
#if defined(DIFFQUAD_HAVE_NEON)
namespace neon {
const KernelTable& table();
}
#endif

bool isa_available(Isa isa);

// Best ISA supported by this CPU, unless DIFFQUAD_SIMD=scalar|avx2|neon
// requests otherwise.
Isa detect_isa();

Isa active_isa();

// Switches the dispatch target; throws invalid-argument if `isa` is not
// available on this machine. Intended for equivalence tests and benchmarks.
void set_active_isa(Isa isa);

const KernelTable& table_for(Isa isa);

const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double weighted_dot(std::span<const double> w, std::span<const double> a,
                           std::span<const double> b) {
  return active().weighted_dot(w.data(), a.data(), b.data(), w.size());
}

inline void gemv(std::span<const double> A, std::size_t rows, std::size_t cols,
                 std::span<const double> x, std::span<double> y) {
  active().gemv(A.data(), rows, cols, x.data(), y.data());
}

inline void gemv_t(std::span<const double> A, std::size_t rows, std::size_t cols,
                   std::span<const double> x, std::span<double> y) {
  active().gemv_t(A.data(), rows, cols, x.data(), y.data());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline double max_abs(std::span<const double> a) { return active().max_abs(a.data(), a.size()); }

inline double abs_sum(std::span<const double> a) { return active().abs_sum(a.data(), a.size()); }

}  // namespace diffquad::simd
