#include <atomic>
#include <cstdlib>
#include <string>

#include "subdiff/errors.hpp"
#include "subdiff/simd.hpp"

namespace subdiff::simd {

namespace {

constexpr Kernels scalar_kernels{&scalar::gemm_acc, &scalar::pow_pos};
#if defined(SUBDIFF_HAVE_AVX2)
constexpr Kernels avx2_kernels{&avx2::gemm_acc, &avx2::pow_pos};
#endif

Backend detect()
{
    if (const char* env = std::getenv("SUBDIFF_SIMD")) {
        const std::string v(env);
        if (v == "scalar")
            return Backend::Scalar;
        if (v == "avx2" && supported(Backend::Avx2))
            return Backend::Avx2;
    }
    return supported(Backend::Avx2) ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& current()
{
    static std::atomic<Backend> b{detect()};
    return b;
}

} // namespace

bool supported(Backend b)
{
    if (b == Backend::Scalar)
        return true;
#if defined(SUBDIFF_HAVE_AVX2)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

std::string_view name(Backend b)
{
    return b == Backend::Avx2 ? "avx2" : "scalar";
}

const Kernels& kernels(Backend b)
{
#if defined(SUBDIFF_HAVE_AVX2)
    if (b == Backend::Avx2) {
        if (!supported(b))
            throw ValidationError("avx2 kernels not supported on this CPU");
        return avx2_kernels;
    }
#else
    if (b == Backend::Avx2)
        throw ValidationError("avx2 kernels not built");
#endif
    return scalar_kernels;
}

Backend active_backend()
{
    return current().load();
}

void set_active_backend(Backend b)
{
    (void)kernels(b);
    current().store(b);
}

const Kernels& active()
{
    return kernels(current().load());
}

} // namespace subdiff::simd
