#include "patcorp/simd_kernels.hpp"

#include <atomic>
#include <cstdlib>

namespace patcorp::simd {

namespace {
std::atomic<bool> g_force_scalar{false};

bool env_force_scalar() {
    static const bool v = [] {
        const char* e = std::getenv("PATCORP_FORCE_SCALAR");
        return e != nullptr && e[0] != '\0' && e[0] != '0';
    }();
    return v;
}
}  // namespace

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
    static const bool v = __builtin_cpu_supports("avx2");
    return v;
#else
    return false;
#endif
}

void force_scalar(bool on) { g_force_scalar.store(on, std::memory_order_relaxed); }

Isa active_isa() {
    if (g_force_scalar.load(std::memory_order_relaxed) || env_force_scalar()) return Isa::kScalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (cpu_has_avx2()) return Isa::kAvx2;
#endif
    return Isa::kScalar;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::kAvx2: return "avx2";
        case Isa::kScalar: break;
    }
    return "scalar";
}

MinhashFoldFn minhash_fold() {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_isa() == Isa::kAvx2) return &minhash_fold_avx2;
#endif
    return &minhash_fold_scalar;
}

TokenCountFn ws_token_count() {
#if defined(__x86_64__) || defined(_M_X64)
    if (active_isa() == Isa::kAvx2) return &ws_token_count_avx2;
#endif
    return &ws_token_count_scalar;
}

}  // namespace patcorp::simd
