#include <immintrin.h>

#include "netcc/simd.hpp"

namespace netcc::simd::avx2 {

namespace {

inline double reduce(__m256d acc) {
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(pair) + _mm_cvtsd_f64(_mm_unpackhi_pd(pair, pair));
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, prod);
    }
    double total = reduce(acc);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

double masked_dot(const double* w, const double* v, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d wv = _mm256_loadu_pd(w + i);
        const __m256d mask = _mm256_cmp_pd(wv, zero, _CMP_GT_OQ);
        const __m256d prod = _mm256_mul_pd(wv, _mm256_loadu_pd(v + i));
        acc = _mm256_add_pd(acc, _mm256_and_pd(mask, prod));
    }
    double total = reduce(acc);
    for (; i < n; ++i)
        if (w[i] > 0.0) total += w[i] * v[i];
    return total;
}

}  // namespace netcc::simd::avx2
