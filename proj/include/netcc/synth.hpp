#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "netcc/cocluster.hpp"
#include "netcc/dense.hpp"
#include "netcc/pipeline.hpp"
#include "netcc/trace.hpp"

namespace netcc {

struct SynthPeriod {
    std::string label;
    double drift = 0.0;
};

struct PlantedSpec {
    std::size_t k = 2;
    std::size_t l = 2;
    std::vector<std::size_t> row_sizes;  // k entries
    std::vector<std::size_t> col_sizes;  // l entries
    DenseMatrix block;                   // k x l, sums to 1
    double noise = 0.0;                  // epsilon in [0, 1)
    double drift = 0.0;                  // delta in [0, 1]
    std::uint64_t seed = 0;

    // Trace generation.
    std::size_t buildings = 4;
    std::size_t groups = 2;               // context groups sharing a building profile
    std::size_t buildings_per_user = 3;
    std::size_t flows = 10000;            // target flow count per period
    double noise_flows = 0.02;            // fraction of flows built to be filtered out
    double intensity = 0.0;               // log1p(minutes) per unit of p(y|x); 0 picks one from the capacity
    double jitter = 0.0;                  // relative spread of piece durations
    std::size_t days = 28;
    Instant start{};                      // begin of the first period
    std::vector<SynthPeriod> periods;     // defaults to one undrifted period "p0"

    std::size_t rows() const;
    std::size_t cols() const;
    void validate() const;
};

// Diagonal-heavy blocks whose row sums are proportional to the row cluster sizes.
DenseMatrix default_block(std::span<const std::size_t> row_sizes, std::size_t l, double diagonal = 0.7);

// key = value lines; see README for the accepted keys.
PlantedSpec parse_planted_spec(std::istream& in, const std::string& name = "spec");
PlantedSpec load_planted_spec(const std::filesystem::path& path);

struct GroundTruth {
    std::vector<std::string> row_ids;
    std::vector<std::uint32_t> row_assign;
    std::vector<std::string> col_ids;
    std::vector<std::uint32_t> col_assign;
    std::vector<std::string> building_ids;
    std::vector<std::uint32_t> building_group;
    JointDistribution p;       // the planted distribution
    JointDistribution target;  // p(y|x) / n, what scaled pipeline output converges to
};

// Block matrix after drift: (1 - delta) B + delta B with column clusters shifted by one.
DenseMatrix drifted_block(const DenseMatrix& block, double drift);

GroundTruth gen_planted_joint(const PlantedSpec& spec);

struct SynthTraces {
    std::vector<FlowRecord> flows;
    std::vector<DhcpLease> leases;
    std::vector<SessionEvent> sessions;
    PrefixDomainMap prefixes;
    PortBuildingMap ports;
    PipelineConfig config;  // settings that reproduce the planted matrix
    GroundTruth truth;
    std::size_t main_flows = 0;
    std::size_t noise_flows = 0;
};

// Traces for one period. The population (clusters, building sets and
// profiles) depends on spec.seed only; period_index varies placement.
SynthTraces gen_synthetic_traces(const PlantedSpec& spec, std::size_t period_index = 0);

// Writes flows.txt, dhcp.txt, sessions.txt, prefixes.txt, ports.txt,
// truth.json and aggregate.ini into dir.
void write_synthetic_traces(const SynthTraces& traces, const std::filesystem::path& dir);
void write_truth(const SynthTraces& traces, std::ostream& out);

double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

struct BruteForceResult {
    double loss = 0.0;
    std::vector<std::uint32_t> row_assign;
    std::vector<std::uint32_t> col_assign;
};

// Exhaustive search over surjective partitions; at most 8 rows and 8 columns.
BruteForceResult brute_force_cocluster(const DenseMatrix& p, std::size_t k, std::size_t l);

// Every partition of n elements into exactly k non-empty blocks as restricted growth strings.
std::vector<std::vector<std::uint32_t>> set_partitions(std::size_t n, std::size_t k);

}  // namespace netcc
