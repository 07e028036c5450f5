#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "netcc/error.hpp"
#include "netcc/matrix_io.hpp"
#include "netcc/pipeline.hpp"
#include "support.hpp"

using namespace netcc;
using netcc::testing::at_seconds;

namespace {

LocalNets nets(std::initializer_list<const char*> blocks) {
    LocalNets n;
    for (auto b : blocks) n.add(*Cidr::parse(b));
    return n;
}

FlowRecord flow(const char* src, const char* dst, double start, double finish) {
    FlowRecord f;
    f.src_ip = *parse_ipv4(src);
    f.dst_ip = *parse_ipv4(dst);
    f.start_ts = at_seconds(start);
    f.finish_ts = at_seconds(finish);
    f.packet_count = 1;
    return f;
}

MacAddress mac(const char* text) { return *parse_mac(text); }

double cell(const ContingencyMatrix& m, const std::string& row, const std::string& col) {
    for (const auto& c : m.cells)
        if (m.row_ids[c.row] == row && m.col_ids[c.col] == col) return c.value;
    return 0.0;
}

}  // namespace

TEST_CASE("cidr blocks") {
    auto c = Cidr::parse("10.0.0.0/8");
    REQUIRE(c);
    CHECK(c->contains(*parse_ipv4("10.255.1.1")));
    CHECK(!c->contains(*parse_ipv4("11.0.0.1")));
    CHECK(Cidr::parse("0.0.0.0/0")->contains(*parse_ipv4("1.2.3.4")));
    CHECK(!Cidr::parse("10.0.0.0/33"));
    CHECK(Cidr::parse("10.0.0.7")->bits == 32);
    CHECK(!Cidr::parse("10.0.0/8"));
}

TEST_CASE("resolve_user picks the latest lease at or before the flow start") {
    LeaseTimeline t;
    const auto A = mac("aa:00:00:00:00:01"), B = mac("aa:00:00:00:00:02");
    t.add({*parse_ipv4("10.1.1.5"), A, at_seconds(100)});
    const auto local = nets({"10.0.0.0/8"});

    auto r = resolve_user(flow("10.1.1.5", "74.125.19.17", 150, 151), t, local);
    CHECK(r.status == ResolveStatus::Resolved);
    CHECK(r.mac == A);

    t.add({*parse_ipv4("10.1.1.5"), B, at_seconds(200)});
    CHECK(resolve_user(flow("10.1.1.5", "74.125.19.17", 150, 151), t, local).mac == A);
    CHECK(resolve_user(flow("74.125.19.17", "10.1.1.5", 200, 201), t, local).mac == B);
    CHECK(resolve_user(flow("10.1.1.5", "74.125.19.17", 50, 51), t, local).status == ResolveStatus::Unresolved);

    CHECK(resolve_user(flow("10.1.1.5", "10.1.1.6", 150, 151), t, local).status == ResolveStatus::AmbiguousEndpoint);
    CHECK(resolve_user(flow("8.8.8.8", "74.125.19.17", 150, 151), t, local).status ==
          ResolveStatus::AmbiguousEndpoint);
}

TEST_CASE("a second lease with the same address and timestamp replaces the first") {
    LeaseTimeline t;
    t.add({*parse_ipv4("10.1.1.5"), mac("aa:00:00:00:00:01"), at_seconds(100)});
    t.add({*parse_ipv4("10.1.1.5"), mac("aa:00:00:00:00:02"), at_seconds(100)});
    CHECK(t.history(*parse_ipv4("10.1.1.5")).size() == 1);
    CHECK(t.lookup(*parse_ipv4("10.1.1.5"), at_seconds(100))->mac == mac("aa:00:00:00:00:02"));
}

TEST_CASE("lease causality holds for random timelines") {
    Rng rng(17);
    LeaseTimeline t;
    std::vector<std::pair<double, std::uint64_t>> leases;
    for (int i = 0; i < 300; ++i) {
        const double ts = static_cast<double>(rng.below(10000));
        const std::uint64_t m = 1 + rng.below(20);
        t.add({*parse_ipv4("10.0.0.1"), MacAddress{m}, at_seconds(ts)});
        leases.emplace_back(ts, m);
    }
    const auto local = nets({"10.0.0.0/8"});
    for (int i = 0; i < 2000; ++i) {
        const double s = static_cast<double>(rng.below(11000));
        const auto r = resolve_user(flow("10.0.0.1", "1.1.1.1", s, s + 1), t, local);
        // Oracle: scan for the greatest timestamp <= s; the last added wins ties.
        std::optional<std::pair<double, std::uint64_t>> best;
        for (const auto& l : leases)
            if (l.first <= s && (!best || l.first >= best->first)) best = l;
        if (!best) {
            CHECK(r.status == ResolveStatus::Unresolved);
            continue;
        }
        REQUIRE(r.status == ResolveStatus::Resolved);
        CHECK(r.lease_ts <= at_seconds(s));
        CHECK(r.lease_ts == at_seconds(best->first));
        CHECK(r.mac.value == best->second);
    }
}

TEST_CASE("resolve_location uses the session with maximal overlap") {
    const auto A = mac("aa:00:00:00:00:01");
    const SwitchPort P{*parse_ipv4("10.0.0.1"), 7}, P1{*parse_ipv4("10.0.0.1"), 1}, P2{*parse_ipv4("10.0.0.1"), 2};
    PortBuildingMap ports;
    ports.add(P, "LVL");
    ports.add(P1, "SAL");
    ports.add(P2, "KAP");

    SessionIndex single({{A, P, at_seconds(0), at_seconds(100)}});
    auto r = resolve_location(at_seconds(10), at_seconds(20), A, single, ports);
    REQUIRE(r.status == LocationStatus::Resolved);
    CHECK(*r.building == "LVL");
    CHECK(resolve_location(at_seconds(200), at_seconds(210), A, single, ports).status == LocationStatus::Unresolved);

    SessionIndex two({{A, P1, at_seconds(0), at_seconds(15)}, {A, P2, at_seconds(12), at_seconds(40)}});
    CHECK(*resolve_location(at_seconds(10), at_seconds(20), A, two, ports).building == "KAP");

    // Equal overlaps: the earlier session wins.
    SessionIndex tie({{A, P2, at_seconds(15), at_seconds(30)}, {A, P1, at_seconds(0), at_seconds(15)}});
    CHECK(*resolve_location(at_seconds(10), at_seconds(20), A, tie, ports).building == "SAL");

    SessionIndex unknown({{A, SwitchPort{*parse_ipv4("10.9.9.9"), 1}, at_seconds(0), at_seconds(100)}});
    CHECK(resolve_location(at_seconds(10), at_seconds(20), A, unknown, ports).status == LocationStatus::UnknownPort);
}

TEST_CASE("best_overlap agrees with a linear scan") {
    Rng rng(23);
    std::vector<SessionInterval> sessions;
    for (int i = 0; i < 200; ++i) {
        const auto s = static_cast<double>(rng.below(5000));
        sessions.push_back({MacAddress{1 + rng.below(3)}, SwitchPort{Ipv4{1}, static_cast<std::uint32_t>(i)},
                            at_seconds(s), at_seconds(s + static_cast<double>(rng.below(300)))});
    }
    SessionIndex index(sessions);
    for (int q = 0; q < 2000; ++q) {
        const MacAddress m{1 + rng.below(3)};
        const auto s = static_cast<double>(rng.below(5500));
        const Instant a = at_seconds(s), b = at_seconds(s + static_cast<double>(rng.below(200)));
        const SessionInterval* best = nullptr;
        Milliseconds best_len{-1};
        for (const auto& x : sessions) {
            if (x.mac != m || x.end < a || x.start > b) continue;
            const auto len = std::min(x.end, b) - std::max(x.start, a);
            if (len > best_len || (len == best_len && x.start < best->start)) {
                best = &x;
                best_len = len;
            }
        }
        const auto* got = index.best_overlap(m, a, b);
        if (!best) {
            CHECK(got == nullptr);
        } else {
            REQUIRE(got != nullptr);
            CHECK(std::min(got->end, b) - std::max(got->start, a) == best_len);
            CHECK(got->start == best->start);
        }
    }
}

TEST_CASE("session pairing") {
    const auto A = mac("aa:00:00:00:00:01");
    const Ipv4 sw = *parse_ipv4("10.0.0.1");
    std::vector<SessionEvent> ev{
        {SessionKind::Start, A, at_seconds(0), sw, 1},    {SessionKind::End, A, at_seconds(10), sw, 1},
        {SessionKind::Start, A, at_seconds(10), sw, 1},   {SessionKind::Start, A, at_seconds(20), sw, 1},
        {SessionKind::End, A, at_seconds(5), sw, 2},      {SessionKind::Start, A, at_seconds(50), sw, 3},
    };
    SessionPairingStats st;
    auto s = pair_sessions(ev, at_seconds(100), &st);
    CHECK(s.size() == 4);
    CHECK(st.implicit_ends == 1);
    CHECK(st.orphan_ends == 1);
    CHECK(st.closed_at_period_end == 2);
}

TEST_CASE("prefix filtering") {
    const auto local = nets({"192.168.0.0/16"});
    std::vector<FlowRecord> f;
    for (int i = 0; i < 4; ++i) f.push_back(flow("192.168.0.1", ("10.0.0." + std::to_string(i + 1)).c_str(), 0, 1));
    CHECK(filter_prefixes(f, local, 3) == std::set<Prefix24>{*parse_prefix24("10.0.0")});
    f.resize(2);
    CHECK(filter_prefixes(f, local, 3).empty());

    std::map<Prefix24, std::uint64_t> counts{
        {*parse_prefix24("1.0.0"), 5}, {*parse_prefix24("2.0.0"), 3}, {*parse_prefix24("3.0.0"), 2}};
    CHECK(filter_prefixes(counts, 3) == std::set<Prefix24>{*parse_prefix24("1.0.0"), *parse_prefix24("2.0.0")});
    CHECK_THROWS_AS(filter_prefixes(counts, 0), ContractError);

    // Only flows with exactly one local endpoint count, attributed to the peer side.
    std::vector<FlowRecord> g{flow("192.168.0.1", "10.0.0.1", 0, 1), flow("10.0.0.2", "192.168.0.9", 0, 1),
                              flow("10.0.0.3", "10.0.0.4", 0, 1), flow("192.168.0.1", "192.168.0.2", 0, 1)};
    auto c = count_peer_prefixes(g, local);
    CHECK(c.size() == 1);
    CHECK(c[*parse_prefix24("10.0.0")] == 2);
}

TEST_CASE("top domain selection") {
    std::map<std::string, std::uint64_t> act{{"g", 10}, {"y", 7}, {"m", 7}, {"z", 1}};
    auto t = select_top_domains(act, 3);
    CHECK(t.domains == std::vector<std::string>{"g", "m", "y"});
    CHECK(!t.fewer_than_requested);
    CHECK(select_top_domains(act, 1).domains == std::vector<std::string>{"g"});
    auto all = select_top_domains(act, 10);
    CHECK(all.domains.size() == 4);
    CHECK(all.fewer_than_requested);
    CHECK_THROWS_AS(select_top_domains(act, 0), ContractError);
}

TEST_CASE("online time is the union of flow intervals") {
    const Period period{"p", at_seconds(0), at_seconds(100000)};
    auto one = [&](std::vector<std::pair<double, double>> iv, AggregationOptions opt = {}) {
        std::vector<ResolvedFlow> f;
        for (auto [a, b] : iv) f.push_back({"u", "d", at_seconds(a), at_seconds(b), std::nullopt});
        return cell(aggregate_online_time(f, period, opt), "u", "d");
    };
    CHECK(one({{0, 60}, {30, 90}}) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(one({{0, 60}}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one({{0, 60}, {120, 180}}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(one({{10, 10}}) == doctest::Approx(1.0 / 60.0).epsilon(1e-12));
    AggregationOptions floor5;
    floor5.zero_floor = Milliseconds(5000);
    CHECK(one({{10, 10}}, floor5) == doctest::Approx(5.0 / 60.0).epsilon(1e-12));
    AggregationOptions sum;
    sum.mode = OnlineTimeMode::SumDurations;
    CHECK(one({{0, 60}, {30, 90}}, sum) == doctest::Approx(2.0).epsilon(1e-12));

    // Clipped to the period; flows starting outside are ignored.
    const Period short_period{"p", at_seconds(0), at_seconds(30)};
    std::vector<ResolvedFlow> f{{"u", "d", at_seconds(0), at_seconds(60), std::nullopt},
                                {"u", "d", at_seconds(40), at_seconds(50), std::nullopt}};
    CHECK(cell(aggregate_online_time(f, short_period), "u", "d") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("aggregation matches a unit-grid oracle, ignores order and merges shards") {
    Rng rng(29);
    const Period period{"p", at_seconds(0), at_seconds(1000)};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ResolvedFlow> flows;
        std::map<std::pair<std::string, std::string>, std::set<int>> covered;
        for (int i = 0; i < 60; ++i) {
            const int a = static_cast<int>(rng.below(900)), len = 1 + static_cast<int>(rng.below(80));
            const std::string u = "u" + std::to_string(rng.below(4)), d = "d" + std::to_string(rng.below(3));
            flows.push_back({u, d, at_seconds(a), at_seconds(a + len), std::nullopt});
            for (int s = a; s < a + len; ++s) covered[{u, d}].insert(s);
        }
        const auto m = aggregate_online_time(flows, period);
        for (const auto& [key, secs] : covered)
            CHECK(cell(m, key.first, key.second) == doctest::Approx(secs.size() / 60.0).epsilon(1e-12));

        auto shuffled = flows;
        rng.shuffle(std::span(shuffled));
        CHECK(aggregate_online_time(shuffled, period) == m);

        // Adding a flow never decreases any cell.
        auto more = flows;
        more.push_back({"u0", "d0", at_seconds(rng.below(900)), at_seconds(950), std::nullopt});
        const auto bigger = aggregate_online_time(more, period);
        for (const auto& c : m.cells) CHECK(cell(bigger, m.row_ids[c.row], m.col_ids[c.col]) >= c.value);

        OnlineTimeAccumulator left, right, whole;
        for (std::size_t i = 0; i < flows.size(); ++i) {
            (i % 2 ? left : right).add(flows[i].user, flows[i].domain, flows[i].start, flows[i].finish);
            whole.add(flows[i].user, flows[i].domain, flows[i].start, flows[i].finish);
        }
        OnlineTimeAccumulator ab = left, ba = right;
        ab.merge(right);
        ba.merge(left);
        CHECK(ab.finish("p") == whole.finish("p"));
        CHECK(ba.finish("p") == whole.finish("p"));
    }
}

TEST_CASE("per-location aggregation groups by building") {
    const Period period{"p", at_seconds(0), at_seconds(1000)};
    std::vector<ResolvedFlow> f{{"u", "d", at_seconds(0), at_seconds(60), std::string("A")},
                                {"u", "d", at_seconds(100), at_seconds(130), std::string("B")},
                                {"v", "d", at_seconds(0), at_seconds(60), std::nullopt}};
    auto by = aggregate_online_time_by_location(f, period);
    REQUIRE(by.size() == 2);
    CHECK(cell(by["A"], "u", "d") == doctest::Approx(1.0));
    CHECK(cell(by["B"], "u", "d") == doctest::Approx(0.5));
}

TEST_CASE("scale_matrix") {
    const double e1 = std::exp(1.0) - 1.0;
    auto p = scale_matrix(from_dense(DenseMatrix{{0.0, e1}, {e1, 0.0}}, {"u", "v"}, {"a", "b"}));
    auto d = p.to_dense();
    CHECK(d(0, 0) == 0.0);
    CHECK(d(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

    auto q = scale_matrix(from_dense(DenseMatrix{{e1, e1}, {e1, e1}}, {"u", "v"}, {"a", "b"})).to_dense();
    for (double v : q.values()) CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    ContingencyMatrix zero_row{"p", {"u", "v"}, {"a"}, {{0, 0, 3.0}}};
    CHECK_THROWS_AS(scale_matrix(zero_row), ContractError);

    Rng rng(31);
    for (int t = 0; t < 100; ++t) {
        const auto n = 1 + rng.below(20), m = 1 + rng.below(20);
        auto w = netcc::testing::random_weights(rng, n, m, 0.4);
        for (double& v : w.values()) v *= 500.0;
        std::vector<std::string> rid, cid;
        for (std::size_t i = 0; i < n; ++i) rid.push_back("u" + std::to_string(i));
        for (std::size_t i = 0; i < m; ++i) cid.push_back("d" + std::to_string(i));
        auto s = scale_matrix(from_dense(w, rid, cid));
        double total = 0.0;
        for (double v : s.row_marginal()) {
            CHECK(v == doctest::Approx(1.0 / static_cast<double>(n)).epsilon(1e-9));
            total += v;
        }
        CHECK(std::abs(total - 1.0) <= 1e-9);
    }
}

TEST_CASE("joint distribution validation") {
    using E = JointDistribution::Entry;
    CHECK_THROWS_AS(JointDistribution::from_entries({"a"}, {"x"}, {E{0, 0, 0.5}}), ContractError);
    CHECK_THROWS_AS(JointDistribution::from_entries({"a", "b"}, {"x"}, {E{0, 0, 1.0}}), ContractError);
    CHECK_THROWS_AS(JointDistribution::from_entries({"a"}, {"x"}, {E{0, 0, 0.5}, E{0, 0, 0.5}}), ContractError);
    CHECK_THROWS_AS(JointDistribution::from_entries({"a"}, {"x"}, {E{0, 0, -1.0}, E{0, 0, 2.0}}), ContractError);
    auto p = JointDistribution::from_entries({"a", "b"}, {"x", "y"}, {E{1, 1, 0.25}, E{0, 0, 0.75}});
    CHECK(p.nnz() == 2);
    CHECK(p.row_marginal()[0] == 0.75);
    CHECK(p.col(1).size() == 1);
    CHECK(p.entries()[0].row == 0);
}

TEST_CASE("pruning and restriction") {
    ContingencyMatrix m{"p", {"u", "v", "w"}, {"a", "b", "c"}, {{0, 0, 1.0}, {0, 1, 0.0}, {2, 0, 2.0}}};
    auto st = prune(m);
    CHECK(st.rows_removed == 1);
    CHECK(st.cols_removed == 2);
    CHECK(m.row_ids == std::vector<std::string>{"u", "w"});
    CHECK(m.col_ids == std::vector<std::string>{"a"});

    ContingencyMatrix n{"p", {"u", "v"}, {"a", "b"}, {{0, 0, 1.0}, {1, 1, 3.0}}};
    std::vector<std::string> rows{"v", "x"}, cols{"b", "a"};
    RestrictStats rs;
    auto r = restrict_to(n, rows, cols, &rs);
    CHECK(r.row_ids == rows);
    CHECK(r.cells.size() == 1);
    CHECK(cell(r, "v", "b") == 3.0);
    CHECK(rs.total_before == 4.0);
    CHECK(rs.total_after == 3.0);
}

namespace {

const char* kFlows =
    "# start | finish | src | sport | dst | dport | proto | tos | pkts | bytes\n"
    "0301.08:00:00.000 | 0301.08:01:00.000 | 10.1.1.5 | 5000 | 74.125.19.17 | 80 | 6 | 0 | 4 | 1789\n"
    "0301.08:00:30.000 | 0301.08:01:30.000 | 74.125.19.99 | 80 | 10.1.1.5 | 5001 | 6 | 0 | 4 | 1789\n"
    "0301.08:10:00.000 | 0301.08:12:00.000 | 10.1.1.6 | 5002 | 74.125.19.17 | 80 | 6 | 0 | 4 | 1789\n"
    "0301.08:10:00.000 | 0301.08:11:00.000 | 10.1.1.6 | 5002 | 128.125.253.1 | 53 | 17 | 0 | 1 | 100\n"
    "0301.08:10:00.000 | 0301.08:11:00.000 | 10.1.1.7 | 5002 | 128.125.253.1 | 53 | 17 | 0 | 1 | 100\n"
    "0301.08:10:00.000 | 0301.08:11:00.000 | 8.8.8.8 | 53 | 128.125.253.1 | 53 | 17 | 0 | 1 | 100\n"
    "0401.08:10:00.000 | 0401.08:11:00.000 | 10.1.1.6 | 5002 | 128.125.253.1 | 53 | 17 | 0 | 1 | 100\n"
    "0301.08:10:00.000 | 0301.08:11:00.000 | 10.1.1.6 | 5002 | 9.9.9.9 | 53 | 17 | 0 | 1 | 100\n";
const char* kDhcp =
    "10.1.1.5,aa:00:00:00:00:01,2012-03-01T07:00:00\n"
    "10.1.1.6,aa:00:00:00:00:02,2012-03-01T07:00:00\n";
const char* kSessions =
    "start,aa:00:00:00:00:01,2012-03-01T07:30:00,10.0.0.1,1\n"
    "end,aa:00:00:00:00:01,2012-03-01T09:00:00,10.0.0.1,1\n"
    "start,aa:00:00:00:00:02,2012-03-01T07:30:00,10.0.0.1,2\n";
const char* kPrefixes = "74.125.19,google.com\n128.125.253,usc.edu\n";
const char* kPorts = "10.0.0.1:1,LVL\n10.0.0.1:2,SAL\n";

PipelineConfig small_config() {
    PipelineConfig c;
    c.period = {"mar", *parse_iso_instant("2012-03-01T00:00:00"), *parse_iso_instant("2012-04-01T00:00:00")};
    c.year = 2012;
    c.local_nets.add(*Cidr::parse("10.0.0.0/8"));
    c.prefix_threshold = 1;
    c.top_domains = 10;
    return c;
}

PipelineResult run_small(const std::string& flows, PipelineConfig cfg = small_config()) {
    std::istringstream f(flows), d(kDhcp), s(kSessions), p(kPrefixes), q(kPorts);
    return run_pipeline(f, d, s, PrefixDomainMap::load(p), PortBuildingMap::load(q), cfg);
}

}  // namespace

TEST_CASE("run_pipeline integrates the three traces") {
    auto r = run_small(kFlows);
    CHECK(r.global.row_ids == std::vector<std::string>{"aa:00:00:00:00:01", "aa:00:00:00:00:02"});
    CHECK(r.global.col_ids == std::vector<std::string>{"google.com", "usc.edu"});
    CHECK(cell(r.global, "aa:00:00:00:00:01", "google.com") == doctest::Approx(1.5));
    CHECK(cell(r.global, "aa:00:00:00:00:02", "google.com") == doctest::Approx(2.0));
    CHECK(cell(r.global, "aa:00:00:00:00:02", "usc.edu") == doctest::Approx(1.0));
    CHECK(r.stats.out_of_period == 1);
    CHECK(r.stats.ambiguous_endpoint == 1);
    CHECK(r.stats.unresolved_user == 1);
    CHECK(r.stats.filtered_prefix == 1);
    CHECK(r.stats.sessions.closed_at_period_end == 1);
    REQUIRE(r.by_building.size() == 2);
    CHECK(cell(r.by_building["LVL"], "aa:00:00:00:00:01", "google.com") == doctest::Approx(1.5));
    CHECK(cell(r.by_building["SAL"], "aa:00:00:00:00:02", "usc.edu") == doctest::Approx(1.0));

    auto cfg = small_config();
    cfg.top_domains = 1;
    auto top1 = run_small(kFlows, cfg);
    CHECK(top1.domains == std::vector<std::string>{"google.com"});
    CHECK(top1.global.col_ids == std::vector<std::string>{"google.com"});
    // Both remaining usc.edu flows, including the one whose user is unknown.
    CHECK(top1.stats.not_top_domain == 2);

    cfg = small_config();
    cfg.fixed_domains = std::vector<std::string>{"google.com", "absent.org"};
    auto fixed = run_small(kFlows, cfg);
    CHECK(fixed.global.col_ids == std::vector<std::string>{"google.com"});
    CHECK(fixed.stats.cols_pruned == 1);
}

TEST_CASE("malformed records abort or are counted") {
    const std::string bad = std::string(kFlows) + "0301.08:10:00.000 | broken\n";
    try {
        run_small(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 10);
    }
    auto cfg = small_config();
    cfg.skip_malformed = true;
    auto r = run_small(bad, cfg);
    CHECK(r.stats.malformed_flows == 1);
    CHECK(r.global == run_small(kFlows).global);
}

TEST_CASE("pipeline output is byte-identical across runs") {
    auto dump = [] {
        auto r = run_small(kFlows);
        std::ostringstream t, h;
        write_matrix(r.global, t, h);
        return t.str() + h.str();
    };
    CHECK(dump() == dump());
}
