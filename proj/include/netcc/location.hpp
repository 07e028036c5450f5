#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netcc/cocluster.hpp"
#include "netcc/dense.hpp"
#include "netcc/pipeline.hpp"

namespace netcc {

struct ContextDescriptor {
    std::string building;
    AssociationMatrix levels;  // k x l under the global assignments, summing to 1
};

// Symmetric L x L table of cosine dissimilarities with zero diagonal.
struct DissimilarityMatrix {
    std::vector<std::string> ids;
    DenseMatrix values;

    std::size_t size() const { return ids.size(); }
    double operator()(std::size_t i, std::size_t j) const { return values(i, j); }
};

struct ThresholdGraph {
    std::vector<std::string> ids;
    double theta = 0.06;
    std::vector<std::vector<std::uint32_t>> adjacency;  // sorted neighbour lists
    std::size_t edge_count = 0;

    bool has_edge(std::size_t i, std::size_t j) const;
    // |E| / C(L, 2); zero for fewer than two nodes.
    double density() const;
};

enum class Linkage { Average, Complete, Single };

const char* to_string(Linkage linkage);
std::optional<Linkage> parse_linkage(std::string_view name);

struct Merge {
    std::size_t a = 0;  // cluster ids: 0..L-1 are leaves, L+i is the cluster made by merge i
    std::size_t b = 0;
    double height = 0.0;
    std::size_t size = 0;
};

struct HierarchicalResult {
    std::vector<Merge> dendrogram;        // all L-1 merges
    std::vector<std::uint32_t> labels;    // cut at n clusters; numbered by first member
    std::size_t clusters = 0;
};

// Descriptor of one building's own distribution under the global model.
// Entities unknown to the model are dropped; nullopt when nothing remains.
std::optional<ContextDescriptor> context_descriptor(std::string building, const JointDistribution& p_loc,
                                                    const CoclusterModel& model);

// 1 - cos(vec a, vec b), clamped to [0, 1].
double cosine_dissimilarity(const DenseMatrix& a, const DenseMatrix& b);

DissimilarityMatrix dissimilarity_matrix(const std::vector<ContextDescriptor>& descriptors);

HierarchicalResult hierarchical_clusters(const DissimilarityMatrix& d, std::size_t n,
                                         Linkage linkage = Linkage::Average);

std::vector<double> average_dissimilarity(const DissimilarityMatrix& d);

ThresholdGraph threshold_graph(const DissimilarityMatrix& d, double theta);

// Every maximal clique with at least min_size nodes, each sorted, the list
// ordered by size (largest first) and then lexicographically.
std::vector<std::vector<std::uint32_t>> maximal_cliques(const ThresholdGraph& g, std::size_t min_size = 3);

std::vector<std::uint32_t> isolated_nodes(const ThresholdGraph& g);

// Upper-triangle dissimilarities binned with width 0.02 over [0, 1]; 1.0 lands in the last bin.
std::vector<std::size_t> dissimilarity_histogram(const DissimilarityMatrix& d, double bin_width = 0.02);

// Descriptors for every building in the map, skipping inactive ones.
std::vector<ContextDescriptor> building_descriptors(const std::map<std::string, JointDistribution>& by_building,
                                                    const CoclusterModel& model);

void write_dissimilarity(const DissimilarityMatrix& d, std::ostream& out, const Provenance* provenance = nullptr);
DissimilarityMatrix read_dissimilarity(std::istream& in, const std::string& name = "dissimilarity");
void write_dendrogram(const HierarchicalResult& h, const std::vector<std::string>& ids, std::ostream& out,
                      const Provenance* provenance = nullptr);
void write_cliques(const std::vector<std::vector<std::uint32_t>>& cliques, const ThresholdGraph& g,
                   std::ostream& out, const Provenance* provenance = nullptr);
void write_histogram(const std::vector<std::size_t>& bins, double bin_width, std::ostream& out,
                     const Provenance* provenance = nullptr);
void write_descriptors(const std::vector<ContextDescriptor>& descriptors, std::ostream& out,
                       const Provenance* provenance = nullptr);

}  // namespace netcc
