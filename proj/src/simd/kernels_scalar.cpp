#include "netcc/simd.hpp"

namespace netcc::simd::scalar {

// Lane j of the four accumulators sees indices j, j+4, j+8, ...; the vector
// kernels reduce their registers in the same ((0+2)+(1+3)) order.

double dot(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (std::size_t j = 0; j < 4; ++j) acc[j] += a[i + j] * b[i + j];
    double total = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (; i < n; ++i) total += a[i] * b[i];
    return total;
}

double masked_dot(const double* w, const double* v, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (std::size_t j = 0; j < 4; ++j) acc[j] += w[i + j] > 0.0 ? w[i + j] * v[i + j] : 0.0;
    double total = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (; i < n; ++i)
        if (w[i] > 0.0) total += w[i] * v[i];
    return total;
}

}  // namespace netcc::simd::scalar
