#include <cstdlib>
#include <string_view>

#include "evbreak/simd/kernels.hpp"

namespace evbreak::simd {

#ifdef EVBREAK_WITH_AVX2
namespace avx2 {
const KernelTable& table();
}
#endif

const KernelTable* avx2_kernels() {
#ifdef EVBREAK_WITH_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    const char* env = std::getenv("EVBREAK_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_kernels();
    if (const KernelTable* v = avx2_kernels()) return *v;
    return scalar_kernels();
  }();
  return chosen;
}

}  // namespace evbreak::simd
