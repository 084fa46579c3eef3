#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>

#include "subdiff/simd.hpp"

namespace subdiff::simd::avx2 {

namespace {

template <int R>
inline void tile(std::size_t width, std::size_t len, const double* w, std::size_t ldw,
                 const double* v, std::size_t ldv, double* out, std::size_t ldo)
{
    std::size_t i = 0;
    for (; i + 8 <= width; i += 8) {
        __m256d acc0[R], acc1[R];
        for (int b = 0; b < R; ++b) {
            acc0[b] = _mm256_setzero_pd();
            acc1[b] = _mm256_setzero_pd();
        }
        const double* vp = v + i;
        for (std::size_t j = 0; j < len; ++j, vp += ldv) {
            const __m256d v0 = _mm256_loadu_pd(vp);
            const __m256d v1 = _mm256_loadu_pd(vp + 4);
            for (int b = 0; b < R; ++b) {
                const __m256d c = _mm256_broadcast_sd(w + b * ldw + j);
                acc0[b] = _mm256_fmadd_pd(c, v0, acc0[b]);
                acc1[b] = _mm256_fmadd_pd(c, v1, acc1[b]);
            }
        }
        for (int b = 0; b < R; ++b) {
            double* o = out + b * ldo + i;
            _mm256_storeu_pd(o, _mm256_add_pd(_mm256_loadu_pd(o), acc0[b]));
            _mm256_storeu_pd(o + 4, _mm256_add_pd(_mm256_loadu_pd(o + 4), acc1[b]));
        }
    }
    for (; i + 4 <= width; i += 4) {
        __m256d acc[R];
        for (int b = 0; b < R; ++b)
            acc[b] = _mm256_setzero_pd();
        const double* vp = v + i;
        for (std::size_t j = 0; j < len; ++j, vp += ldv) {
            const __m256d v0 = _mm256_loadu_pd(vp);
            for (int b = 0; b < R; ++b)
                acc[b] = _mm256_fmadd_pd(_mm256_broadcast_sd(w + b * ldw + j), v0, acc[b]);
        }
        for (int b = 0; b < R; ++b) {
            double* o = out + b * ldo + i;
            _mm256_storeu_pd(o, _mm256_add_pd(_mm256_loadu_pd(o), acc[b]));
        }
    }
    for (; i < width; ++i) {
        for (int b = 0; b < R; ++b) {
            double s = 0.0;
            const double* wr = w + b * ldw;
            for (std::size_t j = 0; j < len; ++j)
                s = std::fma(wr[j], v[j * ldv + i], s);
            out[b * ldo + i] += s;
        }
    }
}

// x in [DBL_MIN, inf), y > 0; exp(y log x) with log carried as hi + lo.
inline __m256d pow4(__m256d x, __m256d y)
{
    const __m256i bits = _mm256_castpd_si256(x);
    const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
    const __m256i one_bits = _mm256_set1_epi64x(0x3FF0000000000000LL);
    __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), one_bits));

    // biased exponent as a double via the 2^52 trick
    const __m256i eb = _mm256_srli_epi64(bits, 52);
    const __m256d two52 = _mm256_set1_pd(4503599627370496.0);
    __m256d e = _mm256_sub_pd(
        _mm256_castsi256_pd(_mm256_or_si256(eb, _mm256_castpd_si256(two52))),
        _mm256_set1_pd(4503599627370496.0 + 1023.0));

    const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(1.4142135623730951), _CMP_GT_OQ);
    m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
    e = _mm256_add_pd(e, _mm256_and_pd(big, _mm256_set1_pd(1.0)));

    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d f = _mm256_sub_pd(m, one);
    const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
    const __m256d z = _mm256_mul_pd(s, s);
    const __m256d w = _mm256_mul_pd(z, z);
    __m256d t1 = _mm256_fmadd_pd(w, _mm256_set1_pd(1.531383769920937332e-01), _mm256_set1_pd(2.222219843214978396e-01));
    t1 = _mm256_fmadd_pd(w, t1, _mm256_set1_pd(3.999999999940941908e-01));
    t1 = _mm256_mul_pd(w, t1);
    __m256d t2 = _mm256_fmadd_pd(w, _mm256_set1_pd(1.479819860511658591e-01), _mm256_set1_pd(1.818357216161805012e-01));
    t2 = _mm256_fmadd_pd(w, t2, _mm256_set1_pd(2.857142874366239149e-01));
    t2 = _mm256_fmadd_pd(w, t2, _mm256_set1_pd(6.666666666666735130e-01));
    t2 = _mm256_mul_pd(z, t2);
    const __m256d R = _mm256_add_pd(t1, t2);

    const __m256d half_f = _mm256_mul_pd(_mm256_set1_pd(0.5), f);
    const __m256d hfsq = _mm256_mul_pd(half_f, f);
    const __m256d hfsq_err = _mm256_fmsub_pd(half_f, f, hfsq);

    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

    // log x = e ln2_hi + f - hfsq + [s (hfsq + R) + e ln2_lo]
    const __m256d a0 = _mm256_mul_pd(e, ln2_hi);
    __m256d s1 = _mm256_add_pd(a0, f);
    __m256d bb = _mm256_sub_pd(s1, a0);
    __m256d e1 = _mm256_add_pd(_mm256_sub_pd(a0, _mm256_sub_pd(s1, bb)), _mm256_sub_pd(f, bb));
    const __m256d nh = _mm256_sub_pd(_mm256_setzero_pd(), hfsq);
    __m256d s2 = _mm256_add_pd(s1, nh);
    bb = _mm256_sub_pd(s2, s1);
    __m256d e2 = _mm256_add_pd(_mm256_sub_pd(s1, _mm256_sub_pd(s2, bb)), _mm256_sub_pd(nh, bb));
    __m256d tail = _mm256_fmadd_pd(s, _mm256_add_pd(hfsq, R), _mm256_mul_pd(e, ln2_lo));
    const __m256d lo = _mm256_sub_pd(_mm256_add_pd(_mm256_add_pd(e1, e2), tail), hfsq_err);
    const __m256d hi = s2;

    const __m256d P = _mm256_mul_pd(y, hi);
    const __m256d Plo = _mm256_fmadd_pd(y, lo, _mm256_fmsub_pd(y, hi, P));

    // exp(P + Plo), Cody-Waite reduction by ln 2
    const __m256d nd = _mm256_round_pd(_mm256_mul_pd(P, _mm256_set1_pd(1.4426950408889634074)),
                                       _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(nd, ln2_hi, P);
    r = _mm256_add_pd(_mm256_fnmadd_pd(nd, ln2_lo, r), Plo);

    __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 479001600.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 39916800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 3628800.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 362880.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 40320.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 5040.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 720.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 120.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 24.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0 / 6.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(0.5));
    p = _mm256_fmadd_pd(p, r, one);
    p = _mm256_fmadd_pd(p, r, one);

    // 2^n from the integer sitting in the low mantissa bits of nd + 1.5*2^52
    const __m256i nbits = _mm256_castpd_si256(_mm256_add_pd(nd, _mm256_set1_pd(6755399441055744.0)));
    const __m256i n = _mm256_sub_epi64(nbits, _mm256_set1_epi64x(0x4338000000000000LL));
    const __m256i scale = _mm256_slli_epi64(_mm256_add_epi64(n, _mm256_set1_epi64x(1023)), 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(scale));
}

} // namespace

void gemm_acc(std::size_t rows, std::size_t width, std::size_t len, const double* w,
              std::size_t ldw, const double* v, std::size_t ldv, double* out, std::size_t ldo)
{
    // chunks of v stay in cache while every row of w passes over them
    constexpr std::size_t kc = 64;
    constexpr std::size_t nc = 256;
    for (std::size_t j0 = 0; j0 < len; j0 += kc) {
        const std::size_t jl = std::min(kc, len - j0);
        for (std::size_t i0 = 0; i0 < width; i0 += nc) {
            const std::size_t il = std::min(nc, width - i0);
            const double* vb = v + j0 * ldv + i0;
            std::size_t b = 0;
            for (; b + 4 <= rows; b += 4)
                tile<4>(il, jl, w + b * ldw + j0, ldw, vb, ldv, out + b * ldo + i0, ldo);
            for (; b < rows; ++b)
                tile<1>(il, jl, w + b * ldw + j0, ldw, vb, ldv, out + b * ldo + i0, ldo);
        }
    }
}

void pow_pos(const double* x, std::size_t count, double y, double* out)
{
    const __m256d yv = _mm256_set1_pd(y);
    const __m256d tiny = _mm256_set1_pd(2.2250738585072014e-308);
    const __m256d huge = _mm256_set1_pd(1e300);
    std::size_t i = 0;
    for (; i + 4 <= count; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x + i);
        const __m256d ok = _mm256_and_pd(_mm256_cmp_pd(xv, tiny, _CMP_GE_OQ),
                                         _mm256_cmp_pd(xv, huge, _CMP_LE_OQ));
        if (_mm256_movemask_pd(ok) == 0xF) {
            _mm256_storeu_pd(out + i, pow4(xv, yv));
        } else {
            for (std::size_t k = i; k < i + 4; ++k)
                out[k] = x[k] == 0.0 ? 0.0 : std::pow(x[k], y);
        }
    }
    for (; i < count; ++i)
        out[i] = x[i] == 0.0 ? 0.0 : std::pow(x[i], y);
}

} // namespace subdiff::simd::avx2
