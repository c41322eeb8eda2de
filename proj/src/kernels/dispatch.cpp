#include <cstdlib>
#include <stdexcept>
#include <string>

#include "tdlg/kernels.hpp"

namespace tdlg::kern {

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Kernels& select() {
    const char* env = std::getenv("TDLG_SIMD");
    const std::string mode = env ? env : "auto";
    if (mode == "scalar") return scalar_kernels();
    if (mode == "avx2") {
        const Kernels* k = avx2_kernels();
        if (!k || !cpu_has_avx2())
            throw std::runtime_error("TDLG_SIMD=avx2 requested but AVX2 is unavailable");
        return *k;
    }
    if (mode != "auto" && mode != "")
        throw std::runtime_error("unknown TDLG_SIMD value: " + mode +
                                 " (expected auto, scalar, or avx2)");
    const Kernels* k = avx2_kernels();
    return (k && cpu_has_avx2()) ? *k : scalar_kernels();
}

}  // namespace

const Kernels& active() {
    static const Kernels& k = select();
    return k;
}

std::string variant_name() { return active().name; }

}  // namespace tdlg::kern
