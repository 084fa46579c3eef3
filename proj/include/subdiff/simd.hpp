#pragma once

#include <cstddef>
#include <string_view>

namespace subdiff::simd {

enum class Backend { Scalar, Avx2 };

struct Kernels {
    // out[b*ldo + i] += sum_j w[b*ldw + j] * v[j*ldv + i],  b < rows, j < len, i < width
    void (*gemm_acc)(std::size_t rows, std::size_t width, std::size_t len, const double* w,
                     std::size_t ldw, const double* v, std::size_t ldv, double* out,
                     std::size_t ldo);
    // out[i] = x[i]^y for x[i] >= 0, y > 0
    void (*pow_pos)(const double* x, std::size_t count, double y, double* out);
};

namespace scalar {
void gemm_acc(std::size_t rows, std::size_t width, std::size_t len, const double* w,
              std::size_t ldw, const double* v, std::size_t ldv, double* out, std::size_t ldo);
void pow_pos(const double* x, std::size_t count, double y, double* out);
} // namespace scalar

namespace avx2 {
void gemm_acc(std::size_t rows, std::size_t width, std::size_t len, const double* w,
              std::size_t ldw, const double* v, std::size_t ldv, double* out, std::size_t ldo);
void pow_pos(const double* x, std::size_t count, double y, double* out);
} // namespace avx2

bool supported(Backend b);
std::string_view name(Backend b);
const Kernels& kernels(Backend b);

// Picked once: SUBDIFF_SIMD=scalar|avx2 overrides CPU detection.
Backend active_backend();
void set_active_backend(Backend b);
const Kernels& active();

} // namespace subdiff::simd
