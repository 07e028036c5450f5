#pragma once

// Shared fixtures and independent oracles for the unit tests.

#include <cmath>
#include <cstdint>
#include <vector>

#include "netcc/dense.hpp"
#include "netcc/pipeline.hpp"
#include "netcc/rng.hpp"

namespace netcc::testing {

// Random non-negative table with every row and column non-empty.
inline DenseMatrix random_weights(Rng& rng, std::size_t rows, std::size_t cols, double density = 0.5) {
    DenseMatrix w(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (rng.uniform() < density) w(r, c) = rng.uniform(0.01, 1.0);
    for (std::size_t r = 0; r < rows; ++r) w(r, rng.below(cols)) += rng.uniform(0.01, 1.0);
    for (std::size_t c = 0; c < cols; ++c) w(rng.below(rows), c) += rng.uniform(0.01, 1.0);
    return w;
}

inline JointDistribution random_joint(Rng& rng, std::size_t rows, std::size_t cols, double density = 0.5) {
    return JointDistribution::from_dense(random_weights(rng, rows, cols, density));
}

// Sparse random joint with about nnz non-zeros (each row and column covered).
inline JointDistribution random_sparse_joint(Rng& rng, std::size_t rows, std::size_t cols, std::size_t nnz) {
    std::vector<JointDistribution::Entry> entries;
    std::vector<std::vector<std::uint32_t>> seen(rows);
    auto add = [&](std::size_t r, std::size_t c) {
        for (auto x : seen[r])
            if (x == c) return;
        seen[r].push_back(static_cast<std::uint32_t>(c));
        entries.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), rng.uniform(0.01, 1.0)});
    };
    for (std::size_t r = 0; r < rows; ++r) add(r, rng.below(cols));
    for (std::size_t c = 0; c < cols; ++c) add(rng.below(rows), c);
    while (entries.size() < nnz) add(rng.below(rows), rng.below(cols));
    double total = 0.0;
    for (const auto& e : entries) total += e.p;
    for (auto& e : entries) e.p /= total;
    std::vector<std::string> rid, cid;
    for (std::size_t r = 0; r < rows; ++r) rid.push_back("r" + std::to_string(r));
    for (std::size_t c = 0; c < cols; ++c) cid.push_back("c" + std::to_string(c));
    return JointDistribution::from_entries(rid, cid, std::move(entries));
}

// Direct double-sum mutual information of a dense table that sums to 1.
inline double oracle_mi(const DenseMatrix& p) {
    std::vector<double> pr(p.rows(), 0.0), pc(p.cols(), 0.0);
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c) {
            pr[r] += p(r, c);
            pc[c] += p(r, c);
        }
    double mi = 0.0;
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c)
            if (p(r, c) > 0) mi += p(r, c) * std::log(p(r, c) / (pr[r] * pc[c]));
    return mi;
}

// Double-loop block sums.
inline DenseMatrix oracle_association(const DenseMatrix& p, const std::vector<std::uint32_t>& ra, std::size_t k,
                                      const std::vector<std::uint32_t>& ca, std::size_t l) {
    DenseMatrix a(k, l);
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c) a(ra[r], ca[c]) += p(r, c);
    return a;
}

inline std::vector<std::uint32_t> random_labels(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::uint32_t> out(n);
    for (auto& v : out) v = static_cast<std::uint32_t>(rng.below(k));
    return out;
}

inline Instant at_seconds(double s) {
    return Instant{} + Milliseconds(static_cast<std::int64_t>(std::llround(s * 1000.0)));
}

}  // namespace netcc::testing
