#include <cstdlib>
#include <stdexcept>
#include <string>

#include "cqsm/simd/kernels.hpp"

namespace cqsm::simd {

std::string_view backend_name(Backend b) noexcept {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "unknown";
}

bool backend_available(Backend b) noexcept {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2:
#if defined(CQSM_HAVE_AVX2_KERNELS)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Backend default_backend() noexcept {
    if (const char* env = std::getenv("CQSM_SIMD"); env && std::string(env) == "scalar") {
        return Backend::scalar;
    }
    return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

const KernelTable& kernels(Backend b) {
    if (!backend_available(b)) {
        throw std::runtime_error("SIMD backend not available: " + std::string(backend_name(b)));
    }
#if defined(CQSM_HAVE_AVX2_KERNELS)
    if (b == Backend::avx2) return avx2_kernels();
#endif
    return scalar_kernels();
}

}  // namespace cqsm::simd
