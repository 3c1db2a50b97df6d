// AVX2+FMA variant of the Laplacian-kernel batch sum. This translation unit
// is compiled with -mavx2 -mfma; the dispatcher only calls into it after a
// runtime CPU check.

#include <immintrin.h>

#include <cstddef>

#include "forkent/entropy/kernels.hpp"

namespace forkent::entropy::kernels {

namespace {

// exp(x) for x in [-708, 0], 4 lanes, accurate to ~2 ulp.
//
// Cody-Waite range reduction x = n*ln2 + r with |r| <= ln2/2, a degree-13
// Taylor polynomial for exp(r) (remainder < 5e-18 on that interval), and
// exponent reconstruction via the IEEE-754 bit layout. Inputs below -708
// must be clamped by the caller; n then stays >= -1021 and 2^n is a normal
// double, so no subnormal handling is needed.
inline __m256d exp_unit_range(__m256d x) {
    const __m256d inv_ln2 = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, inv_ln2),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    const __m256d c13 = _mm256_set1_pd(1.6059043836821613e-10);
    const __m256d c12 = _mm256_set1_pd(2.0876756987868100e-09);
    const __m256d c11 = _mm256_set1_pd(2.5052108385441720e-08);
    const __m256d c10 = _mm256_set1_pd(2.7557319223985888e-07);
    const __m256d c9 = _mm256_set1_pd(2.7557319223985893e-06);
    const __m256d c8 = _mm256_set1_pd(2.4801587301587302e-05);
    const __m256d c7 = _mm256_set1_pd(1.9841269841269841e-04);
    const __m256d c6 = _mm256_set1_pd(1.3888888888888889e-03);
    const __m256d c5 = _mm256_set1_pd(8.3333333333333332e-03);
    const __m256d c4 = _mm256_set1_pd(4.1666666666666664e-02);
    const __m256d c3 = _mm256_set1_pd(1.6666666666666666e-01);
    const __m256d half = _mm256_set1_pd(0.5);
    const __m256d one = _mm256_set1_pd(1.0);

    __m256d p = c13;
    p = _mm256_fmadd_pd(p, r, c12);
    p = _mm256_fmadd_pd(p, r, c11);
    p = _mm256_fmadd_pd(p, r, c10);
    p = _mm256_fmadd_pd(p, r, c9);
    p = _mm256_fmadd_pd(p, r, c8);
    p = _mm256_fmadd_pd(p, r, c7);
    p = _mm256_fmadd_pd(p, r, c6);
    p = _mm256_fmadd_pd(p, r, c5);
    p = _mm256_fmadd_pd(p, r, c4);
    p = _mm256_fmadd_pd(p, r, c3);
    p = _mm256_fmadd_pd(p, r, half);
    p = _mm256_fmadd_pd(p, r, one);
    p = _mm256_fmadd_pd(p, r, one);

    // 2^n via (n + 1023) << 52
    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
    n64 = _mm256_slli_epi64(n64, 52);
    return _mm256_mul_pd(p, _mm256_castsi256_pd(n64));
}

}  // namespace

void accumulate_avx2(const double* l1, std::size_t count, double gamma, CompensatedSum& acc) {
    const __m256d neg_gamma = _mm256_set1_pd(-gamma);
    const __m256d floor_x = _mm256_set1_pd(-708.0);

    std::size_t i = 0;
    alignas(32) double expv[4];
    for (; i + 4 <= count; i += 4) {
        __m256d d = _mm256_loadu_pd(l1 + i);
        __m256d x = _mm256_max_pd(_mm256_mul_pd(neg_gamma, d), floor_x);
        _mm256_store_pd(expv, exp_unit_range(x));
        acc.add(1.0 - expv[0]);
        acc.add(1.0 - expv[1]);
        acc.add(1.0 - expv[2]);
        acc.add(1.0 - expv[3]);
    }
    if (i < count) {
        accumulate_scalar(l1 + i, count - i, gamma, acc);
    }
}

}  // namespace forkent::entropy::kernels
