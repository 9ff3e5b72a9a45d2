#include "ugcs/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ugcs::kernels {
namespace {

constexpr KernelTable kScalar{Isa::scalar, detail::sum_scalar, detail::max_scalar,
                              detail::clamp_nonpositive_scalar};
#if defined(UGCS_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, detail::sum_avx2, detail::max_avx2,
                            detail::clamp_nonpositive_avx2};
#endif
#if defined(UGCS_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, detail::sum_neon, detail::max_neon,
                            detail::clamp_nonpositive_neon};
#endif

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(UGCS_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(UGCS_HAVE_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* pick_default() {
  const KernelTable* best = &kScalar;
  if (cpu_supports(Isa::avx2)) best = &table_for(Isa::avx2);
  if (cpu_supports(Isa::neon)) best = &table_for(Isa::neon);
  if (const char* forced = std::getenv("UGCS_SIMD")) {
    const std::string name(forced);
    for (Isa isa : available_isas()) {
      if (isa_name(isa) == name) return &table_for(isa);
    }
  }
  return best;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

std::vector<Isa> available_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (cpu_supports(isa)) out.push_back(isa);
  }
  return out;
}

const KernelTable& table_for(Isa isa) {
  if (!cpu_supports(isa)) {
    throw std::invalid_argument("SIMD variant not available: " + std::string(isa_name(isa)));
  }
  switch (isa) {
#if defined(UGCS_HAVE_AVX2)
    case Isa::avx2: return kAvx2;
#endif
#if defined(UGCS_HAVE_NEON)
    case Isa::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    t = pick_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void set_active(Isa isa) { g_active.store(&table_for(isa), std::memory_order_release); }

}  // namespace ugcs::kernels
