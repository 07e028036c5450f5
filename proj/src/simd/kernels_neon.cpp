#include <arm_neon.h>

#include "netcc/simd.hpp"

namespace netcc::simd::neon {

// Two float64x2 registers hold lanes {0,1} and {2,3}.

namespace {

inline double reduce(float64x2_t acc01, float64x2_t acc23) {
    const float64x2_t pair = vaddq_f64(acc01, acc23);
    return vgetq_lane_f64(pair, 0) + vgetq_lane_f64(pair, 1);
}

}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0), acc23 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    double total = reduce(acc01, acc23);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

double masked_dot(const double* w, const double* v, std::size_t n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    float64x2_t acc01 = zero, acc23 = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t w01 = vld1q_f64(w + i), w23 = vld1q_f64(w + i + 2);
        const float64x2_t p01 = vmulq_f64(w01, vld1q_f64(v + i));
        const float64x2_t p23 = vmulq_f64(w23, vld1q_f64(v + i + 2));
        const uint64x2_t m01 = vcgtq_f64(w01, zero), m23 = vcgtq_f64(w23, zero);
        acc01 = vaddq_f64(acc01, vreinterpretq_f64_u64(vandq_u64(m01, vreinterpretq_u64_f64(p01))));
        acc23 = vaddq_f64(acc23, vreinterpretq_f64_u64(vandq_u64(m23, vreinterpretq_u64_f64(p23))));
    }
    double total = reduce(acc01, acc23);
    for (; i < n; ++i)
        if (w[i] > 0.0) total += w[i] * v[i];
    return total;
}

}  // namespace netcc::simd::neon
