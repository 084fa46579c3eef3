#include <cmath>

#include "subdiff/simd.hpp"

namespace subdiff::simd::scalar {

void gemm_acc(std::size_t rows, std::size_t width, std::size_t len, const double* w,
              std::size_t ldw, const double* v, std::size_t ldv, double* out, std::size_t ldo)
{
    for (std::size_t b = 0; b < rows; ++b) {
        double* o = out + b * ldo;
        const double* wr = w + b * ldw;
        for (std::size_t j = 0; j < len; ++j) {
            const double c = wr[j];
            const double* vr = v + j * ldv;
            for (std::size_t i = 0; i < width; ++i)
                o[i] += c * vr[i];
        }
    }
}

void pow_pos(const double* x, std::size_t count, double y, double* out)
{
    for (std::size_t i = 0; i < count; ++i)
        out[i] = x[i] == 0.0 ? 0.0 : std::pow(x[i], y);
}

} // namespace subdiff::simd::scalar
