#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "netcc/dense.hpp"
#include "netcc/trace.hpp"

namespace netcc {

struct Cidr {
    Ipv4 base;
    int bits = 32;

    bool contains(Ipv4 ip) const {
        if (bits == 0) return true;
        const std::uint32_t mask = bits >= 32 ? 0xffffffffu : ~(0xffffffffu >> bits);
        return (ip.value & mask) == (base.value & mask);
    }

    // "a.b.c.d/n", a bare address (/32) or a bare /24 prefix "a.b.c".
    static std::optional<Cidr> parse(std::string_view text);
};

// The address ranges that belong to the monitored network; the side of a flow
// inside them is the user, the other side is the peer.
class LocalNets {
public:
    LocalNets() = default;
    explicit LocalNets(std::vector<Cidr> nets) : nets_(std::move(nets)) {}

    void add(Cidr net) { nets_.push_back(net); }
    bool contains(Ipv4 ip) const;
    bool empty() const { return nets_.empty(); }

private:
    std::vector<Cidr> nets_;
};

// A lease holds from its timestamp until the next lease for the same address.
class LeaseTimeline {
public:
    struct Lease {
        Instant ts;
        MacAddress mac;
    };

    // A second lease with an identical (ip, ts) replaces the first.
    void add(const DhcpLease& lease);
    std::optional<Lease> lookup(Ipv4 ip, Instant t) const;
    std::size_t address_count() const { return by_ip_.size(); }
    std::span<const Lease> history(Ipv4 ip) const;

private:
    std::unordered_map<std::uint32_t, std::vector<Lease>> by_ip_;
};

enum class ResolveStatus { Resolved, Unresolved, AmbiguousEndpoint };

struct UserResolution {
    ResolveStatus status = ResolveStatus::Unresolved;
    MacAddress mac;
    Instant lease_ts{};
    Ipv4 local_ip;
    Ipv4 peer_ip;
};

// Exactly one endpoint must be local. Unresolved peers are still reported so the
// caller can count them.
UserResolution resolve_user(const FlowRecord& flow, const LeaseTimeline& timeline,
                            const LocalNets& local_nets);

struct SessionInterval {
    MacAddress mac;
    SwitchPort port;
    Instant start{};
    Instant end{};
};

struct SessionPairingStats {
    std::size_t implicit_ends = 0;   // a start reopened an already open session
    std::size_t orphan_ends = 0;     // end without a preceding start
    std::size_t closed_at_period_end = 0;
};

// Pairs start/end events per (mac, port). Open sessions close at period_end.
std::vector<SessionInterval> pair_sessions(std::span<const SessionEvent> events, Instant period_end,
                                           SessionPairingStats* stats = nullptr);

class SessionIndex {
public:
    explicit SessionIndex(std::vector<SessionInterval> sessions);

    // Session with the largest overlap with [start, finish]; ties go to the earliest
    // session start. Touching intervals count as overlapping with length zero.
    const SessionInterval* best_overlap(MacAddress mac, Instant start, Instant finish) const;
    std::size_t size() const { return count_; }

private:
    struct PerMac {
        std::vector<SessionInterval> sessions;  // sorted by start
        std::vector<Instant> max_end;           // running maximum of end
    };
    std::unordered_map<std::uint64_t, PerMac> by_mac_;
    std::size_t count_ = 0;
};

enum class LocationStatus { Resolved, Unresolved, UnknownPort };

struct LocationResolution {
    LocationStatus status = LocationStatus::Unresolved;
    const std::string* building = nullptr;
};

LocationResolution resolve_location(Instant start, Instant finish, MacAddress mac,
                                    const SessionIndex& sessions, const PortBuildingMap& ports);

std::map<Prefix24, std::uint64_t> count_peer_prefixes(std::span<const FlowRecord> flows,
                                                     const LocalNets& local_nets);
std::set<Prefix24> filter_prefixes(const std::map<Prefix24, std::uint64_t>& peer_counts,
                                   std::uint64_t threshold);
std::set<Prefix24> filter_prefixes(std::span<const FlowRecord> flows, const LocalNets& local_nets,
                                   std::uint64_t threshold);

struct TopDomains {
    std::vector<std::string> domains;  // most active first
    bool fewer_than_requested = false;
};

TopDomains select_top_domains(const std::map<std::string, std::uint64_t>& activity, std::size_t d);

struct Period {
    std::string label;
    Instant begin{};
    Instant end{};  // exclusive

    bool contains(Instant t) const { return t >= begin && t < end; }
};

// User x domain online time in minutes. Cells are stored sparse, sorted by
// (row, col), and strictly positive.
struct ContingencyMatrix {
    struct Cell {
        std::uint32_t row = 0;
        std::uint32_t col = 0;
        double value = 0.0;

        bool operator==(const Cell&) const = default;
    };

    std::string period;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
    std::vector<Cell> cells;

    double total() const;
    bool operator==(const ContingencyMatrix&) const = default;
};

struct PruneStats {
    std::size_t rows_removed = 0;
    std::size_t cols_removed = 0;
};

// Drops zero cells and then rows and columns without any positive cell.
PruneStats prune(ContingencyMatrix& m);

struct RestrictStats {
    double total_before = 0.0;
    double total_after = 0.0;
    std::size_t rows_kept = 0;
    std::size_t cols_kept = 0;
};

// Keeps only the listed entities (in the order given); absent ones get no cells.
ContingencyMatrix restrict_to(const ContingencyMatrix& m, std::span<const std::string> row_ids,
                              std::span<const std::string> col_ids, RestrictStats* stats = nullptr);

ContingencyMatrix from_dense(const DenseMatrix& values, std::vector<std::string> row_ids,
                             std::vector<std::string> col_ids, std::string period = {});

enum class OnlineTimeMode { IntervalUnion, SumDurations };

struct AggregationOptions {
    OnlineTimeMode mode = OnlineTimeMode::IntervalUnion;
    Milliseconds zero_floor{1000};  // length credited to a zero-duration flow
};

struct ResolvedFlow {
    std::string user;
    std::string domain;
    Instant start{};
    Instant finish{};
    std::optional<std::string> building;
};

// Collects per-(user, domain) intervals. merge() concatenates interval lists
// cell-wise, so the result does not depend on shard boundaries or merge order.
class OnlineTimeAccumulator {
public:
    explicit OnlineTimeAccumulator(AggregationOptions options = {}) : options_(options) {}

    void add(std::string_view user, std::string_view domain, Instant start, Instant finish);
    void merge(const OnlineTimeAccumulator& other);
    ContingencyMatrix finish(std::string period) const;
    bool empty() const { return cells_.empty(); }

private:
    using Interval = std::pair<std::int64_t, std::int64_t>;
    AggregationOptions options_;
    std::map<std::pair<std::string, std::string>, std::vector<Interval>> cells_;
};

// Flows are clipped to the period: those starting outside it are ignored and
// finish times are capped at its end.
ContingencyMatrix aggregate_online_time(std::span<const ResolvedFlow> flows, const Period& period,
                                        const AggregationOptions& options = {});
std::map<std::string, ContingencyMatrix> aggregate_online_time_by_location(
    std::span<const ResolvedFlow> flows, const Period& period, const AggregationOptions& options = {});

// Normalized joint distribution p(x, y) in sparse coordinate form with
// precomputed marginals. Construction validates normalization and that every
// row and column carries mass.
class JointDistribution {
public:
    struct Entry {
        std::uint32_t row = 0;
        std::uint32_t col = 0;
        double p = 0.0;
    };

    static constexpr double kNormTolerance = 1e-9;

    JointDistribution() = default;
    static JointDistribution from_entries(std::vector<std::string> row_ids,
                                          std::vector<std::string> col_ids, std::vector<Entry> entries,
                                          std::string period = {});
    // Normalizes a dense non-negative table (ids default to r0.., c0..).
    static JointDistribution from_dense(const DenseMatrix& weights, std::vector<std::string> row_ids = {},
                                        std::vector<std::string> col_ids = {});

    std::size_t rows() const { return row_ids_.size(); }
    std::size_t cols() const { return col_ids_.size(); }
    std::size_t nnz() const { return entries_.size(); }
    const std::string& period() const { return period_; }

    const std::vector<std::string>& row_ids() const { return row_ids_; }
    const std::vector<std::string>& col_ids() const { return col_ids_; }

    std::span<const Entry> entries() const { return entries_; }
    std::span<const Entry> row(std::size_t r) const {
        return std::span(entries_).subspan(row_offsets_[r], row_offsets_[r + 1] - row_offsets_[r]);
    }
    // Column-major copy of the entries.
    std::span<const Entry> col(std::size_t c) const {
        return std::span(by_col_).subspan(col_offsets_[c], col_offsets_[c + 1] - col_offsets_[c]);
    }

    std::span<const double> row_marginal() const { return row_marginal_; }
    std::span<const double> col_marginal() const { return col_marginal_; }

    DenseMatrix to_dense() const;

private:
    std::string period_;
    std::vector<std::string> row_ids_;
    std::vector<std::string> col_ids_;
    std::vector<Entry> entries_;
    std::vector<Entry> by_col_;
    std::vector<std::size_t> row_offsets_;
    std::vector<std::size_t> col_offsets_;
    std::vector<double> row_marginal_;
    std::vector<double> col_marginal_;
};

// log(1 + minutes), each row divided by its sum, then the table by the row count.
JointDistribution scale_matrix(const ContingencyMatrix& m);

struct PipelineConfig {
    Period period;
    int year = 0;  // netflow timestamps omit the year
    LocalNets local_nets;
    std::uint64_t prefix_threshold = 100000;
    std::size_t top_domains = 100;
    AggregationOptions aggregation;
    bool skip_malformed = false;
    // When set, top-domain selection is skipped and these domains are used.
    std::optional<std::vector<std::string>> fixed_domains;
};

struct PipelineStats {
    std::size_t flow_lines = 0;
    std::size_t dhcp_lines = 0;
    std::size_t session_lines = 0;
    std::size_t malformed_flows = 0;
    std::size_t malformed_dhcp = 0;
    std::size_t malformed_sessions = 0;
    std::size_t out_of_period = 0;
    std::size_t ambiguous_endpoint = 0;
    std::size_t filtered_prefix = 0;     // peer prefix below threshold or unmapped
    std::size_t not_top_domain = 0;
    std::size_t unresolved_user = 0;
    std::size_t resolved = 0;
    std::size_t location_unresolved = 0;
    std::size_t unknown_port = 0;
    std::size_t prefixes_kept = 0;
    std::size_t rows_pruned = 0;
    std::size_t cols_pruned = 0;
    bool fewer_domains_than_requested = false;
    SessionPairingStats sessions;
};

struct PipelineResult {
    ContingencyMatrix global;
    std::map<std::string, ContingencyMatrix> by_building;
    std::vector<std::string> domains;
    PipelineStats stats;
};

// Integrates the three trace streams of one period into online-time matrices.
// Throws ParseError on the first malformed record unless skip_malformed is set.
PipelineResult run_pipeline(std::istream& flows, std::istream& dhcp, std::istream& sessions,
                            const PrefixDomainMap& prefixes, const PortBuildingMap& ports,
                            const PipelineConfig& config);

}  // namespace netcc
