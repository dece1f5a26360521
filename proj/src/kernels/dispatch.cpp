#include "rotex/kernels.hpp"

namespace rotex::kernels {

#if defined(ROTEX_HAVE_AVX2_TU)
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(ROTEX_HAVE_AVX2_TU)
  static const bool supported =
      __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& chosen = [] () -> const KernelTable& {
    if (const KernelTable* t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

}  // namespace rotex::kernels
