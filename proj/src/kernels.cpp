#include "lld/kernels.hpp"

#include <cstdlib>
#include <string>

namespace lld::kernels {

namespace detail {
const KernelTable& scalar_table();
#if defined(LLD_HAVE_AVX2_TU)
const KernelTable& avx2_table();
#endif
}  // namespace detail

const KernelTable& scalar() { return detail::scalar_table(); }

const KernelTable* avx2() {
#if defined(LLD_HAVE_AVX2_TU)
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return supported ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& table = []() -> const KernelTable& {
        const char* env = std::getenv("LLD_SIMD");
        const std::string choice = env ? env : "";
        if (choice == "scalar") return scalar();
        if (const KernelTable* t = avx2()) return *t;
        return scalar();
    }();
    return table;
}

}  // namespace lld::kernels
