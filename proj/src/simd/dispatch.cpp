#include <atomic>
#include <cstdlib>
#include <string_view>

#include "netcc/error.hpp"
#include "netcc/simd.hpp"

namespace netcc::simd {

namespace {

constexpr Kernels kScalar{&scalar::dot, &scalar::masked_dot};
#if defined(NETCC_HAVE_AVX2)
constexpr Kernels kAvx2{&avx2::dot, &avx2::masked_dot};
#endif
#if defined(NETCC_HAVE_NEON)
constexpr Kernels kNeon{&neon::dot, &neon::masked_dot};
#endif

Isa initial_choice() {
    if (const char* env = std::getenv("NETCC_ISA")) {
        const std::string_view v(env);
        if (v == "scalar") return Isa::Scalar;
        if (v == "avx2" && supported(Isa::Avx2)) return Isa::Avx2;
        if (v == "neon" && supported(Isa::Neon)) return Isa::Neon;
    }
    return best_supported();
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_choice()};
    return isa;
}

}  // namespace

const char* name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "?";
}

bool supported(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return true;
        case Isa::Avx2:
#if defined(NETCC_HAVE_AVX2)
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
        case Isa::Neon:
#if defined(NETCC_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Isa best_supported() {
    if (supported(Isa::Avx2)) return Isa::Avx2;
    if (supported(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

Isa active() { return current().load(std::memory_order_relaxed); }

void select(Isa isa) {
    if (!supported(isa)) throw ContractError(std::string("ISA not supported here: ") + name(isa));
    current().store(isa, std::memory_order_relaxed);
}

const Kernels& kernels(Isa isa) {
    switch (isa) {
#if defined(NETCC_HAVE_AVX2)
        case Isa::Avx2: return kAvx2;
#endif
#if defined(NETCC_HAVE_NEON)
        case Isa::Neon: return kNeon;
#endif
        default: return kScalar;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ContractError("dot: length mismatch");
    return kernels(active()).dot(a.data(), b.data(), a.size());
}

double masked_dot(std::span<const double> w, std::span<const double> v) {
    if (w.size() != v.size()) throw ContractError("masked_dot: length mismatch");
    return kernels(active()).masked_dot(w.data(), v.data(), w.size());
}

void masked_dot_rows(std::span<const double> w, std::span<const double> table, std::span<double> out) {
    if (table.size() != w.size() * out.size()) throw ContractError("masked_dot_rows: shape mismatch");
    const auto& k = kernels(active());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = k.masked_dot(w.data(), table.data() + r * w.size(), w.size());
}

}  // namespace netcc::simd
