#include "netcc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <tuple>

#include "text.hpp"

namespace netcc {

std::optional<Cidr> Cidr::parse(std::string_view text) {
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        if (auto ip = parse_ipv4(text)) return Cidr{*ip, 32};
        if (auto prefix = parse_prefix24(text)) return Cidr{Ipv4{prefix->value << 8}, 24};
        return std::nullopt;
    }
    auto ip = parse_ipv4(text.substr(0, slash));
    auto bits_text = text.substr(slash + 1);
    int bits = -1;
    auto [ptr, ec] = std::from_chars(bits_text.data(), bits_text.data() + bits_text.size(), bits);
    if (!ip || ec != std::errc{} || ptr != bits_text.data() + bits_text.size() || bits < 0 || bits > 32)
        return std::nullopt;
    return Cidr{*ip, bits};
}

bool LocalNets::contains(Ipv4 ip) const {
    return std::any_of(nets_.begin(), nets_.end(), [ip](const Cidr& c) { return c.contains(ip); });
}

void LeaseTimeline::add(const DhcpLease& lease) {
    auto& list = by_ip_[lease.ip.value];
    auto it = std::lower_bound(list.begin(), list.end(), lease.ts,
                               [](const Lease& l, Instant t) { return l.ts < t; });
    if (it != list.end() && it->ts == lease.ts)
        it->mac = lease.mac;
    else
        list.insert(it, Lease{lease.ts, lease.mac});
}

std::optional<LeaseTimeline::Lease> LeaseTimeline::lookup(Ipv4 ip, Instant t) const {
    auto found = by_ip_.find(ip.value);
    if (found == by_ip_.end()) return std::nullopt;
    const auto& list = found->second;
    auto it = std::upper_bound(list.begin(), list.end(), t,
                               [](Instant v, const Lease& l) { return v < l.ts; });
    if (it == list.begin()) return std::nullopt;
    return *std::prev(it);
}

std::span<const LeaseTimeline::Lease> LeaseTimeline::history(Ipv4 ip) const {
    auto found = by_ip_.find(ip.value);
    if (found == by_ip_.end()) return {};
    return found->second;
}

UserResolution resolve_user(const FlowRecord& flow, const LeaseTimeline& timeline,
                            const LocalNets& local_nets) {
    UserResolution out;
    const bool src_local = local_nets.contains(flow.src_ip);
    const bool dst_local = local_nets.contains(flow.dst_ip);
    if (src_local == dst_local) {
        out.status = ResolveStatus::AmbiguousEndpoint;
        return out;
    }
    out.local_ip = src_local ? flow.src_ip : flow.dst_ip;
    out.peer_ip = src_local ? flow.dst_ip : flow.src_ip;
    if (auto lease = timeline.lookup(out.local_ip, flow.start_ts)) {
        out.status = ResolveStatus::Resolved;
        out.mac = lease->mac;
        out.lease_ts = lease->ts;
    } else {
        out.status = ResolveStatus::Unresolved;
    }
    return out;
}

std::vector<SessionInterval> pair_sessions(std::span<const SessionEvent> events, Instant period_end,
                                           SessionPairingStats* stats) {
    std::vector<const SessionEvent*> order;
    order.reserve(events.size());
    for (const auto& e : events) order.push_back(&e);
    // Ends sort before starts at equal timestamps so back-to-back sessions pair cleanly.
    std::sort(order.begin(), order.end(), [](const SessionEvent* a, const SessionEvent* b) {
        return std::tuple(a->mac, SwitchPort{a->switch_ip, a->switch_port}, a->ts,
                          a->kind == SessionKind::Start) <
               std::tuple(b->mac, SwitchPort{b->switch_ip, b->switch_port}, b->ts,
                          b->kind == SessionKind::Start);
    });

    SessionPairingStats local;
    std::vector<SessionInterval> out;
    Instant open_ts{};
    bool open = false;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const auto& e = *order[i];
        const SwitchPort port{e.switch_ip, e.switch_port};
        if (e.kind == SessionKind::Start) {
            if (open) {
                out.push_back({e.mac, port, open_ts, e.ts});
                ++local.implicit_ends;
            }
            open_ts = e.ts;
            open = true;
        } else if (open) {
            out.push_back({e.mac, port, open_ts, e.ts});
            open = false;
        } else {
            ++local.orphan_ends;
        }
        const bool group_ends =
            i + 1 == order.size() || order[i + 1]->mac != e.mac ||
            SwitchPort{order[i + 1]->switch_ip, order[i + 1]->switch_port} != port;
        if (group_ends && open) {
            out.push_back({e.mac, port, open_ts, std::max(open_ts, period_end)});
            ++local.closed_at_period_end;
            open = false;
        }
    }
    if (stats) *stats = local;
    return out;
}

SessionIndex::SessionIndex(std::vector<SessionInterval> sessions) : count_(sessions.size()) {
    for (auto& s : sessions) by_mac_[s.mac.value].sessions.push_back(s);
    for (auto& [mac, per] : by_mac_) {
        std::sort(per.sessions.begin(), per.sessions.end(), [](const auto& a, const auto& b) {
            return std::tie(a.start, a.end, a.port) < std::tie(b.start, b.end, b.port);
        });
        per.max_end.resize(per.sessions.size());
        Instant running = Instant::min();
        for (std::size_t i = 0; i < per.sessions.size(); ++i) {
            running = std::max(running, per.sessions[i].end);
            per.max_end[i] = running;
        }
    }
}

const SessionInterval* SessionIndex::best_overlap(MacAddress mac, Instant start, Instant finish) const {
    auto found = by_mac_.find(mac.value);
    if (found == by_mac_.end()) return nullptr;
    const auto& per = found->second;
    auto upper = std::upper_bound(per.sessions.begin(), per.sessions.end(), finish,
                                  [](Instant t, const SessionInterval& s) { return t < s.start; });
    const SessionInterval* best = nullptr;
    Milliseconds best_overlap{-1};
    for (auto i = static_cast<std::size_t>(upper - per.sessions.begin()); i-- > 0;) {
        if (per.max_end[i] < start) break;
        const auto& s = per.sessions[i];
        if (s.end < start) continue;
        const auto overlap = std::min(s.end, finish) - std::max(s.start, start);
        // Scanning backwards, so a tie moves the choice to the earlier start.
        if (overlap >= best_overlap) {
            best_overlap = overlap;
            best = &s;
        }
    }
    return best;
}

LocationResolution resolve_location(Instant start, Instant finish, MacAddress mac,
                                    const SessionIndex& sessions, const PortBuildingMap& ports) {
    const auto* s = sessions.best_overlap(mac, start, finish);
    if (!s) return {LocationStatus::Unresolved, nullptr};
    const auto* building = ports.find(s->port);
    if (!building) return {LocationStatus::UnknownPort, nullptr};
    return {LocationStatus::Resolved, building};
}

std::map<Prefix24, std::uint64_t> count_peer_prefixes(std::span<const FlowRecord> flows,
                                                     const LocalNets& local_nets) {
    std::map<Prefix24, std::uint64_t> counts;
    for (const auto& f : flows) {
        const bool src_local = local_nets.contains(f.src_ip);
        const bool dst_local = local_nets.contains(f.dst_ip);
        if (src_local == dst_local) continue;
        ++counts[prefix_of(src_local ? f.dst_ip : f.src_ip)];
    }
    return counts;
}

std::set<Prefix24> filter_prefixes(const std::map<Prefix24, std::uint64_t>& peer_counts,
                                   std::uint64_t threshold) {
    if (threshold < 1) throw ContractError("prefix threshold must be at least 1");
    std::set<Prefix24> kept;
    for (const auto& [prefix, count] : peer_counts)
        if (count >= threshold) kept.insert(prefix);
    return kept;
}

std::set<Prefix24> filter_prefixes(std::span<const FlowRecord> flows, const LocalNets& local_nets,
                                   std::uint64_t threshold) {
    return filter_prefixes(count_peer_prefixes(flows, local_nets), threshold);
}

TopDomains select_top_domains(const std::map<std::string, std::uint64_t>& activity, std::size_t d) {
    if (d < 1) throw ContractError("top-domain count must be at least 1");
    std::vector<std::pair<std::string, std::uint64_t>> ranked(activity.begin(), activity.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    TopDomains out;
    out.fewer_than_requested = ranked.size() < d;
    for (std::size_t i = 0; i < std::min(d, ranked.size()); ++i) out.domains.push_back(ranked[i].first);
    return out;
}

double ContingencyMatrix::total() const {
    double s = 0.0;
    for (const auto& c : cells) s += c.value;
    return s;
}

PruneStats prune(ContingencyMatrix& m) {
    std::erase_if(m.cells, [](const auto& c) { return !(c.value > 0.0); });
    std::vector<char> row_used(m.row_ids.size(), 0), col_used(m.col_ids.size(), 0);
    for (const auto& c : m.cells) {
        row_used[c.row] = 1;
        col_used[c.col] = 1;
    }
    auto compact = [](std::vector<std::string>& ids, const std::vector<char>& used) {
        std::vector<std::uint32_t> remap(ids.size(), 0);
        std::vector<std::string> kept;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (!used[i]) continue;
            remap[i] = static_cast<std::uint32_t>(kept.size());
            kept.push_back(std::move(ids[i]));
        }
        const std::size_t removed = ids.size() - kept.size();
        ids = std::move(kept);
        return std::pair(remap, removed);
    };
    auto [row_map, rows_removed] = compact(m.row_ids, row_used);
    auto [col_map, cols_removed] = compact(m.col_ids, col_used);
    for (auto& c : m.cells) {
        c.row = row_map[c.row];
        c.col = col_map[c.col];
    }
    return {rows_removed, cols_removed};
}

ContingencyMatrix restrict_to(const ContingencyMatrix& m, std::span<const std::string> row_ids,
                              std::span<const std::string> col_ids, RestrictStats* stats) {
    std::unordered_map<std::string, std::uint32_t> row_index, col_index;
    for (std::size_t i = 0; i < row_ids.size(); ++i) row_index.emplace(row_ids[i], static_cast<std::uint32_t>(i));
    for (std::size_t i = 0; i < col_ids.size(); ++i) col_index.emplace(col_ids[i], static_cast<std::uint32_t>(i));

    ContingencyMatrix out;
    out.period = m.period;
    out.row_ids.assign(row_ids.begin(), row_ids.end());
    out.col_ids.assign(col_ids.begin(), col_ids.end());
    RestrictStats local;
    std::vector<char> row_seen(row_ids.size(), 0), col_seen(col_ids.size(), 0);
    for (const auto& c : m.cells) {
        local.total_before += c.value;
        auto r = row_index.find(m.row_ids[c.row]);
        auto k = col_index.find(m.col_ids[c.col]);
        if (r == row_index.end() || k == col_index.end()) continue;
        out.cells.push_back({r->second, k->second, c.value});
        local.total_after += c.value;
        row_seen[r->second] = 1;
        col_seen[k->second] = 1;
    }
    std::sort(out.cells.begin(), out.cells.end(),
              [](const auto& a, const auto& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    local.rows_kept = static_cast<std::size_t>(std::count(row_seen.begin(), row_seen.end(), 1));
    local.cols_kept = static_cast<std::size_t>(std::count(col_seen.begin(), col_seen.end(), 1));
    if (stats) *stats = local;
    return out;
}

ContingencyMatrix from_dense(const DenseMatrix& values, std::vector<std::string> row_ids,
                             std::vector<std::string> col_ids, std::string period) {
    if (row_ids.size() != values.rows() || col_ids.size() != values.cols())
        throw ContractError("id lists do not match matrix shape");
    ContingencyMatrix m;
    m.period = std::move(period);
    m.row_ids = std::move(row_ids);
    m.col_ids = std::move(col_ids);
    for (std::size_t r = 0; r < values.rows(); ++r)
        for (std::size_t c = 0; c < values.cols(); ++c) {
            if (values(r, c) < 0.0) throw ContractError("negative online time");
            if (values(r, c) > 0.0)
                m.cells.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c), values(r, c)});
        }
    return m;
}

void OnlineTimeAccumulator::add(std::string_view user, std::string_view domain, Instant start,
                                Instant finish) {
    if (finish < start) throw ContractError("flow interval ends before it starts");
    std::int64_t s = start.time_since_epoch().count();
    std::int64_t e = finish.time_since_epoch().count();
    if (e == s) e = s + options_.zero_floor.count();
    cells_[{std::string(user), std::string(domain)}].emplace_back(s, e);
}

void OnlineTimeAccumulator::merge(const OnlineTimeAccumulator& other) {
    for (const auto& [key, intervals] : other.cells_) {
        auto& mine = cells_[key];
        mine.insert(mine.end(), intervals.begin(), intervals.end());
    }
}

ContingencyMatrix OnlineTimeAccumulator::finish(std::string period) const {
    ContingencyMatrix m;
    m.period = std::move(period);
    std::map<std::string, std::uint32_t> rows, cols;
    for (const auto& [key, intervals] : cells_) {
        rows.emplace(key.first, 0);
        cols.emplace(key.second, 0);
    }
    for (auto& [id, index] : rows) {
        index = static_cast<std::uint32_t>(m.row_ids.size());
        m.row_ids.push_back(id);
    }
    for (auto& [id, index] : cols) {
        index = static_cast<std::uint32_t>(m.col_ids.size());
        m.col_ids.push_back(id);
    }
    std::vector<Interval> work;
    for (const auto& [key, intervals] : cells_) {
        std::int64_t total_ms = 0;
        if (options_.mode == OnlineTimeMode::SumDurations) {
            for (const auto& [s, e] : intervals) total_ms += e - s;
        } else {
            work = intervals;
            std::sort(work.begin(), work.end());
            std::int64_t cur_s = work.front().first, cur_e = work.front().second;
            for (std::size_t i = 1; i < work.size(); ++i) {
                if (work[i].first > cur_e) {
                    total_ms += cur_e - cur_s;
                    cur_s = work[i].first;
                    cur_e = work[i].second;
                } else {
                    cur_e = std::max(cur_e, work[i].second);
                }
            }
            total_ms += cur_e - cur_s;
        }
        if (total_ms > 0)
            m.cells.push_back({rows[key.first], cols[key.second], static_cast<double>(total_ms) / 60000.0});
    }
    // Map iteration is already (user, domain) ordered, matching the id order.
    return m;
}

namespace {

bool clip(const ResolvedFlow& f, const Period& period, Instant& s, Instant& e) {
    if (!period.contains(f.start)) return false;
    s = f.start;
    e = std::min(f.finish, period.end);
    return true;
}

}  // namespace

ContingencyMatrix aggregate_online_time(std::span<const ResolvedFlow> flows, const Period& period,
                                        const AggregationOptions& options) {
    OnlineTimeAccumulator acc(options);
    Instant s, e;
    for (const auto& f : flows)
        if (clip(f, period, s, e)) acc.add(f.user, f.domain, s, e);
    return acc.finish(period.label);
}

std::map<std::string, ContingencyMatrix> aggregate_online_time_by_location(
    std::span<const ResolvedFlow> flows, const Period& period, const AggregationOptions& options) {
    std::map<std::string, OnlineTimeAccumulator> per;
    Instant s, e;
    for (const auto& f : flows) {
        if (!f.building || !clip(f, period, s, e)) continue;
        per.try_emplace(*f.building, options).first->second.add(f.user, f.domain, s, e);
    }
    std::map<std::string, ContingencyMatrix> out;
    for (const auto& [building, acc] : per) out.emplace(building, acc.finish(period.label));
    return out;
}

JointDistribution JointDistribution::from_entries(std::vector<std::string> row_ids,
                                                  std::vector<std::string> col_ids,
                                                  std::vector<Entry> entries, std::string period) {
    JointDistribution j;
    j.period_ = std::move(period);
    j.row_ids_ = std::move(row_ids);
    j.col_ids_ = std::move(col_ids);
    const std::size_t n = j.row_ids_.size(), m = j.col_ids_.size();
    std::erase_if(entries, [](const Entry& e) { return e.p == 0.0; });
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    j.row_marginal_.assign(n, 0.0);
    j.col_marginal_.assign(m, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        if (e.row >= n || e.col >= m) throw ContractError("entry index out of range");
        if (!(e.p > 0.0) || !std::isfinite(e.p)) throw ContractError("probabilities must be positive and finite");
        if (i && entries[i - 1].row == e.row && entries[i - 1].col == e.col)
            throw ContractError("duplicate entry");
        j.row_marginal_[e.row] += e.p;
        j.col_marginal_[e.col] += e.p;
        total += e.p;
    }
    if (n == 0 || m == 0) throw ContractError("empty joint distribution");
    if (std::abs(total - 1.0) > kNormTolerance) throw ContractError("joint distribution does not sum to 1");
    for (double v : j.row_marginal_)
        if (!(v > 0.0)) throw ContractError("row without mass");
    for (double v : j.col_marginal_)
        if (!(v > 0.0)) throw ContractError("column without mass");

    j.entries_ = std::move(entries);
    j.row_offsets_.assign(n + 1, 0);
    j.col_offsets_.assign(m + 1, 0);
    for (const auto& e : j.entries_) {
        ++j.row_offsets_[e.row + 1];
        ++j.col_offsets_[e.col + 1];
    }
    std::partial_sum(j.row_offsets_.begin(), j.row_offsets_.end(), j.row_offsets_.begin());
    std::partial_sum(j.col_offsets_.begin(), j.col_offsets_.end(), j.col_offsets_.begin());
    j.by_col_.resize(j.entries_.size());
    std::vector<std::size_t> fill(j.col_offsets_.begin(), j.col_offsets_.end() - 1);
    for (const auto& e : j.entries_) j.by_col_[fill[e.col]++] = e;
    return j;
}

JointDistribution JointDistribution::from_dense(const DenseMatrix& weights, std::vector<std::string> row_ids,
                                                std::vector<std::string> col_ids) {
    if (row_ids.empty())
        for (std::size_t r = 0; r < weights.rows(); ++r) row_ids.push_back("r" + std::to_string(r));
    if (col_ids.empty())
        for (std::size_t c = 0; c < weights.cols(); ++c) col_ids.push_back("c" + std::to_string(c));
    const double total = weights.sum();
    if (!(total > 0.0)) throw ContractError("weights sum to zero");
    std::vector<Entry> entries;
    for (std::size_t r = 0; r < weights.rows(); ++r)
        for (std::size_t c = 0; c < weights.cols(); ++c) {
            if (weights(r, c) < 0.0) throw ContractError("negative weight");
            if (weights(r, c) > 0.0)
                entries.push_back({static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(c),
                                   weights(r, c) / total});
        }
    return from_entries(std::move(row_ids), std::move(col_ids), std::move(entries));
}

DenseMatrix JointDistribution::to_dense() const {
    DenseMatrix d(rows(), cols());
    for (const auto& e : entries_) d(e.row, e.col) = e.p;
    return d;
}

JointDistribution scale_matrix(const ContingencyMatrix& m) {
    const std::size_t n = m.row_ids.size();
    std::vector<double> row_sum(n, 0.0);
    std::vector<JointDistribution::Entry> entries;
    entries.reserve(m.cells.size());
    for (const auto& c : m.cells) {
        if (c.value < 0.0) throw ContractError("negative online time");
        const double s = std::log1p(c.value);
        row_sum[c.row] += s;
        entries.push_back({c.row, c.col, s});
    }
    for (std::size_t r = 0; r < n; ++r)
        if (!(row_sum[r] > 0.0))
            throw ContractError("all-zero row '" + m.row_ids[r] + "' (prune before scaling)");
    const double rows = static_cast<double>(n);
    for (auto& e : entries) e.p = e.p / row_sum[e.row] / rows;
    return JointDistribution::from_entries(m.row_ids, m.col_ids, std::move(entries), m.period);
}

PipelineResult run_pipeline(std::istream& flows_in, std::istream& dhcp_in, std::istream& sessions_in,
                            const PrefixDomainMap& prefixes, const PortBuildingMap& ports,
                            const PipelineConfig& config) {
    PipelineResult result;
    auto& st = result.stats;

    LeaseTimeline leases;
    for_each_record(dhcp_in, [&](std::string_view line, std::size_t no) {
        ++st.dhcp_lines;
        try {
            leases.add(parse_dhcp_lease(line, no));
        } catch (const ParseError& e) {
            if (!config.skip_malformed) throw ParseError("dhcp: " + e.reason(), no);
            ++st.malformed_dhcp;
        }
    });

    std::vector<SessionEvent> events;
    for_each_record(sessions_in, [&](std::string_view line, std::size_t no) {
        ++st.session_lines;
        try {
            auto e = parse_session_event(line, no);
            if (e.ts < config.period.end) events.push_back(e);
        } catch (const ParseError& e) {
            if (!config.skip_malformed) throw ParseError("sessions: " + e.reason(), no);
            ++st.malformed_sessions;
        }
    });
    SessionIndex sessions(pair_sessions(events, config.period.end, &st.sessions));
    events.clear();
    events.shrink_to_fit();

    // One pass over the flows keeps a compact record of every in-period flow
    // with a determinable peer; filtering needs the complete prefix counts.
    struct Pending {
        Instant start, finish;
        Prefix24 peer;
        ResolveStatus status;
        MacAddress mac;
    };
    std::vector<Pending> pending;
    std::map<Prefix24, std::uint64_t> peer_counts;
    for_each_record(flows_in, [&](std::string_view line, std::size_t no) {
        ++st.flow_lines;
        FlowRecord f;
        try {
            f = parse_flow_record(line, config.year, no);
        } catch (const ParseError& e) {
            if (!config.skip_malformed) throw ParseError("flows: " + e.reason(), no);
            ++st.malformed_flows;
            return;
        }
        if (!config.period.contains(f.start_ts)) {
            ++st.out_of_period;
            return;
        }
        auto who = resolve_user(f, leases, config.local_nets);
        if (who.status == ResolveStatus::AmbiguousEndpoint) {
            ++st.ambiguous_endpoint;
            return;
        }
        const auto peer = prefix_of(who.peer_ip);
        ++peer_counts[peer];
        pending.push_back({f.start_ts, std::min(f.finish_ts, config.period.end), peer, who.status, who.mac});
    });

    std::map<Prefix24, const std::string*> prefix_domain;
    if (config.fixed_domains) {
        result.domains = *config.fixed_domains;
        std::set<std::string> wanted(result.domains.begin(), result.domains.end());
        for (const auto& [prefix, count] : peer_counts) {
            const auto* d = prefixes.find(prefix);
            if (d && wanted.count(*d)) prefix_domain.emplace(prefix, d);
        }
        st.prefixes_kept = prefix_domain.size();
    } else {
        std::map<std::string, std::uint64_t> activity;
        for (auto prefix : filter_prefixes(peer_counts, config.prefix_threshold)) {
            const auto* d = prefixes.find(prefix);
            if (!d) continue;
            ++st.prefixes_kept;
            activity[*d] += peer_counts[prefix];
            prefix_domain.emplace(prefix, d);
        }
        auto top = select_top_domains(activity, config.top_domains);
        st.fewer_domains_than_requested = top.fewer_than_requested;
        result.domains = top.domains;
        std::set<std::string> wanted(top.domains.begin(), top.domains.end());
        std::erase_if(prefix_domain, [&](const auto& kv) { return !wanted.count(*kv.second); });
    }

    OnlineTimeAccumulator global(config.aggregation);
    std::map<std::string, OnlineTimeAccumulator> by_building;
    for (const auto& p : pending) {
        auto d = prefix_domain.find(p.peer);
        if (d == prefix_domain.end()) {
            const auto* mapped = prefixes.find(p.peer);
            if (mapped && !config.fixed_domains && peer_counts[p.peer] >= config.prefix_threshold)
                ++st.not_top_domain;
            else
                ++st.filtered_prefix;
            continue;
        }
        if (p.status != ResolveStatus::Resolved) {
            ++st.unresolved_user;
            continue;
        }
        ++st.resolved;
        const auto user = to_string(p.mac);
        global.add(user, *d->second, p.start, p.finish);
        auto loc = resolve_location(p.start, p.finish, p.mac, sessions, ports);
        if (loc.status == LocationStatus::Resolved)
            by_building.try_emplace(*loc.building, config.aggregation)
                .first->second.add(user, *d->second, p.start, p.finish);
        else if (loc.status == LocationStatus::UnknownPort)
            ++st.unknown_port;
        else
            ++st.location_unresolved;
    }

    result.global = global.finish(config.period.label);
    auto pruned = prune(result.global);
    st.rows_pruned = pruned.rows_removed;
    // Selected domains that no resolved user reached never become columns.
    st.cols_pruned = pruned.cols_removed + (result.domains.size() - std::min(result.domains.size(), result.global.col_ids.size()));
    for (const auto& [building, acc] : by_building) {
        auto m = acc.finish(config.period.label);
        prune(m);
        if (!m.cells.empty()) result.by_building.emplace(building, std::move(m));
    }
    return result;
}

}  // namespace netcc
