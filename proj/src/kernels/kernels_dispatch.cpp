#include <cstdlib>
#include <string>

#include "thickknot/kernels.hpp"

namespace thickknot::kernels {

#if defined(THICKKNOT_BUILD_AVX2)
const Table& avx2_table_impl();
#endif

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const Table* avx2_table() {
#if defined(THICKKNOT_BUILD_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  static const Table& table = [] () -> const Table& {
    const char* env = std::getenv("THICKKNOT_SIMD");
    const std::string choice = env ? env : "auto";
    if (choice == "scalar") return scalar_table();
    if (const Table* avx = avx2_table()) return *avx;
    return scalar_table();
  }();
  return table;
}

}  // namespace thickknot::kernels
