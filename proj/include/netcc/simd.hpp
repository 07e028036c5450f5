#pragma once

// Dense inner-loop kernels with a scalar reference and vector variants chosen
// at runtime. Every variant accumulates in the same four-lane order and avoids
// fused multiply-add, so all of them return bit-identical results.

#include <cstddef>
#include <span>

namespace netcc::simd {

enum class Isa { Scalar, Avx2, Neon };

const char* name(Isa isa);
bool supported(Isa isa);
Isa best_supported();
Isa active();
// Overrides the runtime choice; throws ContractError if the ISA is unavailable.
void select(Isa isa);

struct Kernels {
    double (*dot)(const double* a, const double* b, std::size_t n);
    // Sum of w[i] * v[i] over the indices with w[i] > 0. Terms with w[i] == 0
    // contribute nothing even when v[i] is infinite.
    double (*masked_dot)(const double* w, const double* v, std::size_t n);
};

const Kernels& kernels(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double masked_dot(const double* w, const double* v, std::size_t n);
}  // namespace scalar

#if defined(NETCC_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double masked_dot(const double* w, const double* v, std::size_t n);
}  // namespace avx2
#endif

#if defined(NETCC_HAVE_NEON)
namespace neon {
double dot(const double* a, const double* b, std::size_t n);
double masked_dot(const double* w, const double* v, std::size_t n);
}  // namespace neon
#endif

double dot(std::span<const double> a, std::span<const double> b);
double masked_dot(std::span<const double> w, std::span<const double> v);

// out[r] = masked_dot(w, table row r) for a row-major table of out.size() rows.
void masked_dot_rows(std::span<const double> w, std::span<const double> table, std::span<double> out);

}  // namespace netcc::simd
