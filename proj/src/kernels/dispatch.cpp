#include <cstdlib>
#include <string_view>

#include "kernels_internal.hpp"

namespace fga::kernels {

namespace {

#if defined(FGALGEBRA_HAVE_AVX2_KERNELS)
bool cpu_has_avx2_fma() noexcept {
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable& choose() noexcept {
  const KernelTable* simd = avx2();
  const char* forced = std::getenv("FGALGEBRA_KERNELS");
  if (forced != nullptr && std::string_view(forced) == "scalar") return scalar();
  if (simd != nullptr) return *simd;
  return scalar();
}

}  // namespace

const KernelTable& scalar() noexcept { return detail::scalar_table(); }

const KernelTable* avx2() noexcept {
#if defined(FGALGEBRA_HAVE_AVX2_KERNELS)
  static const bool supported = cpu_has_avx2_fma();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() noexcept {
  static const KernelTable& table = choose();
  return table;
}

}  // namespace fga::kernels
