#include <atomic>
#include <cstdlib>
#include <string>

#include "diffquad/error.hpp"
#include "diffquad/simd.hpp"

namespace diffquad::simd {
namespace {

std::atomic<Isa>& active_slot() {
  static std::atomic<Isa> slot{detect_isa()};
  return slot;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(DIFFQUAD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(DIFFQUAD_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() {
  if (const char* env = std::getenv("DIFFQUAD_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
      if (want == to_string(isa) && isa_available(isa)) return isa;
    }
  }
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa active_isa() { return active_slot().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  require(isa_available(isa), "ISA " + std::string(to_string(isa)) + " not available on this CPU");
  active_slot().store(isa, std::memory_order_relaxed);
}

const KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(DIFFQUAD_HAVE_AVX2)
    case Isa::avx2: return avx2::table();
#endif
#if defined(DIFFQUAD_HAVE_NEON)
    case Isa::neon: return neon::table();
#endif
    default: return scalar::table();
  }
}

const KernelTable& active() { return table_for(active_isa()); }

}  // namespace diffquad::simd
