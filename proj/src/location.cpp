#include "netcc/location.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "netcc/simd.hpp"
#include "text.hpp"

namespace netcc {

bool ThresholdGraph::has_edge(std::size_t i, std::size_t j) const {
    const auto& n = adjacency[i];
    return std::binary_search(n.begin(), n.end(), static_cast<std::uint32_t>(j));
}

double ThresholdGraph::density() const {
    const double l = static_cast<double>(ids.size());
    return ids.size() < 2 ? 0.0 : static_cast<double>(edge_count) / (l * (l - 1.0) / 2.0);
}

const char* to_string(Linkage linkage) {
    switch (linkage) {
        case Linkage::Average: return "average";
        case Linkage::Complete: return "complete";
        case Linkage::Single: return "single";
    }
    return "?";
}

std::optional<Linkage> parse_linkage(std::string_view name) {
    if (name == "average") return Linkage::Average;
    if (name == "complete") return Linkage::Complete;
    if (name == "single") return Linkage::Single;
    return std::nullopt;
}

std::optional<ContextDescriptor> context_descriptor(std::string building, const JointDistribution& p_loc,
                                                    const CoclusterModel& model) {
    std::unordered_map<std::string, std::uint32_t> row_cluster, col_cluster;
    for (std::size_t i = 0; i < model.row_ids.size(); ++i) row_cluster.emplace(model.row_ids[i], model.row_assign[i]);
    for (std::size_t i = 0; i < model.col_ids.size(); ++i) col_cluster.emplace(model.col_ids[i], model.col_assign[i]);
    std::vector<std::int64_t> ra(p_loc.rows(), -1), ca(p_loc.cols(), -1);
    for (std::size_t r = 0; r < p_loc.rows(); ++r)
        if (auto it = row_cluster.find(p_loc.row_ids()[r]); it != row_cluster.end()) ra[r] = it->second;
    for (std::size_t c = 0; c < p_loc.cols(); ++c)
        if (auto it = col_cluster.find(p_loc.col_ids()[c]); it != col_cluster.end()) ca[c] = it->second;

    ContextDescriptor d{std::move(building), AssociationMatrix(model.k, model.l)};
    double kept = 0.0;
    for (const auto& e : p_loc.entries()) {
        if (ra[e.row] < 0 || ca[e.col] < 0) continue;
        d.levels(static_cast<std::size_t>(ra[e.row]), static_cast<std::size_t>(ca[e.col])) += e.p;
        kept += e.p;
    }
    if (!(kept > 0.0)) return std::nullopt;
    for (double& v : d.levels.values()) v /= kept;
    return d;
}

double cosine_dissimilarity(const DenseMatrix& a, const DenseMatrix& b) {
    if (!a.same_shape(b)) throw ContractError("cosine_dissimilarity: shape mismatch");
    const double ab = simd::dot(a.values(), b.values());
    const double aa = simd::dot(a.values(), a.values());
    const double bb = simd::dot(b.values(), b.values());
    if (!(aa > 0.0) || !(bb > 0.0)) throw ContractError("cosine_dissimilarity: zero-norm input");
    const double d = 1.0 - ab / std::sqrt(aa * bb);
    return std::clamp(d, 0.0, 1.0);
}

DissimilarityMatrix dissimilarity_matrix(const std::vector<ContextDescriptor>& descriptors) {
    DissimilarityMatrix d;
    const std::size_t n = descriptors.size();
    for (const auto& desc : descriptors) d.ids.push_back(desc.building);
    d.values = DenseMatrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = cosine_dissimilarity(descriptors[i].levels, descriptors[j].levels);
            d.values(i, j) = v;
            d.values(j, i) = v;
        }
    return d;
}

HierarchicalResult hierarchical_clusters(const DissimilarityMatrix& d, std::size_t n, Linkage linkage) {
    const std::size_t leaves = d.size();
    if (n < 1 || n > leaves) throw ContractError("cluster count must lie in [1, L]");
    // Slot i holds one active cluster; merged clusters reuse the lower slot.
    DenseMatrix dist = d.values;
    std::vector<std::size_t> id(leaves), size(leaves, 1);
    std::iota(id.begin(), id.end(), 0);
    std::vector<char> active(leaves, 1);

    HierarchicalResult out;
    for (std::size_t step = 0; step + 1 < leaves; ++step) {
        std::size_t bi = 0, bj = 0;
        bool found = false;
        for (std::size_t i = 0; i < leaves; ++i) {
            if (!active[i]) continue;
            for (std::size_t j = i + 1; j < leaves; ++j) {
                if (!active[j]) continue;
                const auto lo = std::min(id[i], id[j]), hi = std::max(id[i], id[j]);
                const auto blo = std::min(id[bi], id[bj]), bhi = std::max(id[bi], id[bj]);
                if (!found || dist(i, j) < dist(bi, bj) ||
                    (dist(i, j) == dist(bi, bj) && std::pair(lo, hi) < std::pair(blo, bhi))) {
                    bi = i;
                    bj = j;
                    found = true;
                }
            }
        }
        const double height = dist(bi, bj);
        out.dendrogram.push_back({std::min(id[bi], id[bj]), std::max(id[bi], id[bj]), height, size[bi] + size[bj]});
        for (std::size_t k = 0; k < leaves; ++k) {
            if (!active[k] || k == bi || k == bj) continue;
            double v = 0.0;
            switch (linkage) {
                case Linkage::Average:
                    v = (static_cast<double>(size[bi]) * dist(bi, k) + static_cast<double>(size[bj]) * dist(bj, k)) /
                        static_cast<double>(size[bi] + size[bj]);
                    break;
                case Linkage::Complete: v = std::max(dist(bi, k), dist(bj, k)); break;
                case Linkage::Single: v = std::min(dist(bi, k), dist(bj, k)); break;
            }
            dist(bi, k) = v;
            dist(k, bi) = v;
        }
        size[bi] += size[bj];
        id[bi] = leaves + step;
        active[bj] = 0;
    }

    // Cut: replay the first L - n merges with union-find.
    std::vector<std::size_t> parent(2 * leaves);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t m = 0; m < leaves - n; ++m) {
        const auto& merge = out.dendrogram[m];
        parent[find(merge.a)] = leaves + m;
        parent[find(merge.b)] = leaves + m;
    }
    std::unordered_map<std::size_t, std::uint32_t> label_of_root;
    out.labels.resize(leaves);
    for (std::size_t i = 0; i < leaves; ++i) {
        auto [it, inserted] = label_of_root.try_emplace(find(i), static_cast<std::uint32_t>(label_of_root.size()));
        out.labels[i] = it->second;
    }
    out.clusters = label_of_root.size();
    return out;
}

std::vector<double> average_dissimilarity(const DissimilarityMatrix& d) {
    const std::size_t n = d.size();
    if (n < 2) throw ContractError("average_dissimilarity needs at least two buildings");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) s += d(i, j);
        out[i] = s / static_cast<double>(n - 1);
    }
    return out;
}

ThresholdGraph threshold_graph(const DissimilarityMatrix& d, double theta) {
    if (!(theta > 0.0 && theta <= 1.0)) throw ContractError("threshold must lie in (0, 1]");
    ThresholdGraph g;
    g.ids = d.ids;
    g.theta = theta;
    g.adjacency.resize(d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            if (i != j && d(i, j) < theta) g.adjacency[i].push_back(static_cast<std::uint32_t>(j));
    for (const auto& n : g.adjacency) g.edge_count += n.size();
    g.edge_count /= 2;
    return g;
}

namespace {

class Bitset {
public:
    explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= 1ULL << (i % 64); }
    void reset(std::size_t i) { words_[i / 64] &= ~(1ULL << (i % 64)); }
    bool none() const {
        return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
    }
    Bitset operator&(const Bitset& o) const {
        Bitset r = *this;
        for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= o.words_[w];
        return r;
    }
    Bitset minus(const Bitset& o) const {
        Bitset r = *this;
        for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] &= ~o.words_[w];
        return r;
    }
    Bitset operator|(const Bitset& o) const {
        Bitset r = *this;
        for (std::size_t w = 0; w < words_.size(); ++w) r.words_[w] |= o.words_[w];
        return r;
    }
    std::size_t count_and(const Bitset& o) const {
        std::size_t c = 0;
        for (std::size_t w = 0; w < words_.size(); ++w) c += static_cast<std::size_t>(std::popcount(words_[w] & o.words_[w]));
        return c;
    }
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            std::uint64_t bits = words_[w];
            while (bits) {
                f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
    }

private:
    std::vector<std::uint64_t> words_;
};

// Bron-Kerbosch with Tomita pivoting.
void expand(std::vector<std::uint32_t>& clique, Bitset candidates, Bitset excluded, const std::vector<Bitset>& nbr,
            std::size_t min_size, std::vector<std::vector<std::uint32_t>>& out) {
    if (candidates.none()) {
        if (excluded.none() && clique.size() >= min_size) {
            auto c = clique;
            std::sort(c.begin(), c.end());
            out.push_back(std::move(c));
        }
        return;
    }
    std::size_t pivot = 0, best = 0;
    bool have = false;
    (candidates | excluded).for_each([&](std::size_t u) {
        const auto c = candidates.count_and(nbr[u]);
        if (!have || c > best) {
            pivot = u;
            best = c;
            have = true;
        }
    });
    std::vector<std::size_t> branch;
    candidates.minus(nbr[pivot]).for_each([&](std::size_t v) { branch.push_back(v); });
    for (std::size_t v : branch) {
        clique.push_back(static_cast<std::uint32_t>(v));
        expand(clique, candidates & nbr[v], excluded & nbr[v], nbr, min_size, out);
        clique.pop_back();
        candidates.reset(v);
        excluded.set(v);
    }
}

}  // namespace

std::vector<std::vector<std::uint32_t>> maximal_cliques(const ThresholdGraph& g, std::size_t min_size) {
    if (min_size < 1) throw ContractError("min_size must be at least 1");
    const std::size_t n = g.ids.size();
    std::vector<Bitset> nbr(n, Bitset(n));
    for (std::size_t i = 0; i < n; ++i)
        for (auto j : g.adjacency[i]) nbr[i].set(j);
    Bitset all(n);
    for (std::size_t i = 0; i < n; ++i) all.set(i);
    std::vector<std::vector<std::uint32_t>> out;
    std::vector<std::uint32_t> clique;
    expand(clique, all, Bitset(n), nbr, min_size, out);
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    return out;
}

std::vector<std::uint32_t> isolated_nodes(const ThresholdGraph& g) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < g.adjacency.size(); ++i)
        if (g.adjacency[i].empty()) out.push_back(static_cast<std::uint32_t>(i));
    return out;
}

std::vector<std::size_t> dissimilarity_histogram(const DissimilarityMatrix& d, double bin_width) {
    if (!(bin_width > 0.0)) throw ContractError("bin width must be positive");
    const auto bins = static_cast<std::size_t>(std::llround(1.0 / bin_width));
    std::vector<std::size_t> out(bins, 0);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            auto b = static_cast<std::size_t>(std::floor(d(i, j) / bin_width));
            ++out[std::min(b, bins - 1)];
        }
    return out;
}

std::vector<ContextDescriptor> building_descriptors(const std::map<std::string, JointDistribution>& by_building,
                                                    const CoclusterModel& model) {
    std::vector<ContextDescriptor> out;
    for (const auto& [building, p] : by_building)
        if (auto d = context_descriptor(building, p, model)) out.push_back(std::move(*d));
    return out;
}

void write_dissimilarity(const DissimilarityMatrix& d, std::ostream& out, const Provenance* provenance) {
    if (provenance) provenance->write(out);
    out << "building";
    for (const auto& id : d.ids) out << ',' << id;
    out << '\n';
    for (std::size_t i = 0; i < d.size(); ++i) {
        out << d.ids[i];
        for (std::size_t j = 0; j < d.size(); ++j) out << ',' << text::format_double(d(i, j));
        out << '\n';
    }
}

DissimilarityMatrix read_dissimilarity(std::istream& in, const std::string& name) {
    DissimilarityMatrix d;
    std::vector<std::vector<double>> rows;
    bool header = true;
    for_each_record(in, [&](std::string_view line, std::size_t no) {
        auto f = text::split(line, ',');
        if (header) {
            for (std::size_t i = 1; i < f.size(); ++i) d.ids.emplace_back(f[i]);
            header = false;
            return;
        }
        if (f.size() != d.ids.size() + 1) throw DataError(name + ":" + std::to_string(no) + ": ragged row");
        if (rows.size() >= d.ids.size() || f[0] != d.ids[rows.size()])
            throw DataError(name + ":" + std::to_string(no) + ": row label does not match header");
        std::vector<double> row(d.ids.size());
        for (std::size_t j = 0; j < row.size(); ++j)
            if (!text::parse_double(f[j + 1], row[j]))
                throw DataError(name + ":" + std::to_string(no) + ": invalid number");
        rows.push_back(std::move(row));
    });
    if (rows.size() != d.ids.size()) throw DataError(name + ": matrix is not square");
    d.values = DenseMatrix(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.size(); ++j) d.values(i, j) = rows[i][j];
    return d;
}

void write_dendrogram(const HierarchicalResult& h, const std::vector<std::string>& ids, std::ostream& out,
                      const Provenance* provenance) {
    if (provenance) provenance->write(out);
    out << "# leaves 0.." << ids.size() - 1 << " are buildings; merge i creates cluster " << ids.size() << "+i\n";
    for (std::size_t i = 0; i < ids.size(); ++i) out << "leaf," << i << ',' << ids[i] << ',' << h.labels[i] << '\n';
    for (const auto& m : h.dendrogram)
        out << "merge," << m.a << ',' << m.b << ',' << text::format_double(m.height) << ',' << m.size << '\n';
}

void write_cliques(const std::vector<std::vector<std::uint32_t>>& cliques, const ThresholdGraph& g,
                   std::ostream& out, const Provenance* provenance) {
    if (provenance) provenance->write(out);
    out << "# theta " << text::format_double(g.theta) << " edges " << g.edge_count << " density "
        << text::format_double(g.density()) << '\n';
    for (const auto& c : cliques) {
        for (std::size_t i = 0; i < c.size(); ++i) out << (i ? "," : "") << g.ids[c[i]];
        out << '\n';
    }
}

void write_histogram(const std::vector<std::size_t>& bins, double bin_width, std::ostream& out,
                     const Provenance* provenance) {
    if (provenance) provenance->write(out);
    for (std::size_t b = 0; b < bins.size(); ++b)
        out << text::format_double(static_cast<double>(b) * bin_width) << ' ' << bins[b] << '\n';
}

void write_descriptors(const std::vector<ContextDescriptor>& descriptors, std::ostream& out,
                       const Provenance* provenance) {
    if (provenance) provenance->write(out);
    for (const auto& d : descriptors) {
        out << "building " << d.building << '\n';
        write_association(d.levels, out);
    }
}

}  // namespace netcc
