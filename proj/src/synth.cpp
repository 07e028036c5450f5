#include "netcc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "netcc/error.hpp"
#include "netcc/rng.hpp"
#include "text.hpp"

namespace netcc {

namespace {

using std::chrono::hours;
using std::chrono::minutes;

constexpr std::uint64_t kMacBase = 0x020000000000ULL;
constexpr Milliseconds kSlot = hours(8);
constexpr Milliseconds kMargin = minutes(5);
constexpr std::size_t kSlotsPerDay = 3;
constexpr std::size_t kPortsPerBuilding = 8;

Ipv4 ip(std::uint32_t a, std::uint32_t b, std::uint32_t c, std::uint32_t d) {
    return Ipv4{(a << 24) | (b << 16) | (c << 8) | d};
}

std::string padded(const char* prefix, std::size_t i, std::size_t count, const char* suffix = "") {
    std::size_t width = 2;
    for (std::size_t c = count; c >= 100; c /= 10) ++width;
    std::string digits = std::to_string(i);
    return prefix + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits + suffix;
}

std::vector<std::uint32_t> planted_labels(std::span<const std::size_t> sizes, Rng& rng) {
    std::vector<std::uint32_t> out;
    for (std::size_t c = 0; c < sizes.size(); ++c) out.insert(out.end(), sizes[c], static_cast<std::uint32_t>(c));
    rng.shuffle(std::span(out));
    return out;
}

Ipv4 user_ip(std::size_t slot) {
    return ip(10, 1 + static_cast<std::uint32_t>(slot / 250), 0, 1 + static_cast<std::uint32_t>(slot % 250));
}
Ipv4 domain_peer(std::size_t y, std::uint32_t host) {
    return ip(100, 64 + static_cast<std::uint32_t>(y / 256), static_cast<std::uint32_t>(y % 256), host);
}
Ipv4 switch_of(std::size_t b) {
    return ip(10, 200, static_cast<std::uint32_t>(b / 250), 1 + static_cast<std::uint32_t>(b % 250));
}

// Everything that stays fixed across the periods of one spec.
struct Population {
    std::vector<std::uint32_t> row_assign, col_assign;
    std::vector<std::vector<std::uint32_t>> user_buildings;  // distinct, sorted
    std::vector<DenseMatrix> profiles;                       // per building, k x l, positive
    std::vector<std::uint32_t> building_group;
};

Population make_population(const PlantedSpec& spec) {
    Population pop;
    Rng rng(mix_seed(spec.seed, 0));
    pop.row_assign = planted_labels(spec.row_sizes, rng);
    pop.col_assign = planted_labels(spec.col_sizes, rng);

    std::vector<DenseMatrix> group_profile;
    for (std::size_t g = 0; g < spec.groups; ++g) {
        DenseMatrix m(spec.k, spec.l);
        for (double& v : m.values()) {
            const double u = rng.uniform();
            v = 0.05 + u * u * u;
        }
        group_profile.push_back(std::move(m));
    }
    for (std::size_t b = 0; b < spec.buildings; ++b) {
        pop.building_group.push_back(static_cast<std::uint32_t>(b % spec.groups));
        DenseMatrix m = group_profile[b % spec.groups];
        for (double& v : m.values()) v *= 1.0 + 0.1 * (rng.uniform() - 0.5);
        pop.profiles.push_back(std::move(m));
    }

    const std::size_t per_user = std::min(spec.buildings_per_user, spec.buildings);
    std::vector<std::uint32_t> all(spec.buildings);
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t x = 0; x < spec.rows(); ++x) {
        rng.shuffle(std::span(all));
        std::vector<std::uint32_t> mine(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(per_user));
        std::sort(mine.begin(), mine.end());
        pop.user_buildings.push_back(std::move(mine));
    }
    return pop;
}

std::vector<double> parse_numbers(std::string_view value, const std::string& where) {
    std::vector<double> out;
    std::string s(value);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) {
        double v;
        if (!text::parse_double(tok, v)) throw DataError(where + ": invalid number '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<std::size_t> even_sizes(std::size_t total, std::size_t parts) {
    std::vector<std::size_t> out(parts, total / parts);
    for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
    return out;
}

}  // namespace

std::size_t PlantedSpec::rows() const { return std::accumulate(row_sizes.begin(), row_sizes.end(), std::size_t{0}); }
std::size_t PlantedSpec::cols() const { return std::accumulate(col_sizes.begin(), col_sizes.end(), std::size_t{0}); }

void PlantedSpec::validate() const {
    if (k < 1 || l < 1) throw ContractError("k and l must be positive");
    if (row_sizes.size() != k || col_sizes.size() != l) throw ContractError("cluster sizes do not match k and l");
    for (auto s : row_sizes)
        if (s == 0) throw ContractError("empty planted row cluster");
    for (auto s : col_sizes)
        if (s == 0) throw ContractError("empty planted column cluster");
    if (block.rows() != k || block.cols() != l) throw ContractError("block matrix must be k x l");
    double total = 0.0;
    for (double v : block.values()) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ContractError("block entries must be non-negative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ContractError("block matrix must sum to 1");
    if (!(noise >= 0.0 && noise < 1.0)) throw ContractError("noise must lie in [0, 1)");
    if (!(drift >= 0.0 && drift <= 1.0)) throw ContractError("drift must lie in [0, 1]");
    if (noise == 0.0) {
        const auto shifted = drifted_block(block, drift);
        for (std::size_t r = 0; r < k; ++r) {
            double s = 0.0;
            for (std::size_t c = 0; c < l; ++c) s += shifted(r, c);
            if (!(s > 0.0)) throw ContractError("row cluster without mass");
        }
        for (std::size_t c = 0; c < l; ++c) {
            double s = 0.0;
            for (std::size_t r = 0; r < k; ++r) s += shifted(r, c);
            if (!(s > 0.0)) throw ContractError("column cluster without mass");
        }
    }
    if (buildings < 1 || groups < 1 || groups > buildings) throw ContractError("need 1 <= groups <= buildings");
    if (buildings_per_user < 1) throw ContractError("buildings_per_user must be positive");
    if (days < 1) throw ContractError("days must be positive");
    if (!(noise_flows >= 0.0 && noise_flows < 1.0)) throw ContractError("noise_flows must lie in [0, 1)");
    if (!(jitter >= 0.0 && jitter < 1.0)) throw ContractError("jitter must lie in [0, 1)");
    if (!(intensity >= 0.0)) throw ContractError("intensity must be non-negative");
    for (const auto& p : periods)
        if (!(p.drift >= 0.0 && p.drift <= 1.0)) throw ContractError("period drift must lie in [0, 1]");
}

DenseMatrix default_block(std::span<const std::size_t> row_sizes, std::size_t l, double diagonal) {
    const std::size_t k = row_sizes.size();
    const double n = static_cast<double>(std::accumulate(row_sizes.begin(), row_sizes.end(), std::size_t{0}));
    DenseMatrix b(k, l);
    for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < l; ++c) {
            const double share = l == 1 ? 1.0 : (c == r % l ? diagonal : (1.0 - diagonal) / static_cast<double>(l - 1));
            b(r, c) = static_cast<double>(row_sizes[r]) / n * share;
        }
    return b;
}

PlantedSpec parse_planted_spec(std::istream& in, const std::string& name) {
    PlantedSpec spec;
    std::map<std::string, std::string> kv;
    for_each_record(in, [&](std::string_view line, std::size_t no) {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw DataError(name + ":" + std::to_string(no) + ": expected key = value");
        std::string key(text::trim(line.substr(0, eq)));
        if (!kv.emplace(key, std::string(text::trim(line.substr(eq + 1)))).second)
            throw DataError(name + ":" + std::to_string(no) + ": duplicate key '" + key + "'");
    });
    auto take = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = std::move(it->second);
        kv.erase(it);
        return v;
    };
    auto number = [&](const char* key, double fallback) {
        auto v = take(key);
        if (!v) return fallback;
        auto nums = parse_numbers(*v, name + ": " + key);
        if (nums.size() != 1) throw DataError(name + ": " + key + " expects one number");
        return nums[0];
    };
    auto count = [&](const char* key, std::size_t fallback) {
        const double v = number(key, static_cast<double>(fallback));
        if (v < 0 || v != std::floor(v)) throw DataError(name + ": " + key + " must be a non-negative integer");
        return static_cast<std::size_t>(v);
    };
    // "rows = 40" splits a total evenly; "rows = 30 10" gives one size per cluster.
    auto sizes = [&](const char* key, const char* total_key, std::size_t clusters) {
        auto v = take(key);
        const char* used = key;
        if (!v) {
            v = take(total_key);
            used = total_key;
        }
        if (!v) return even_sizes(clusters * 10, clusters);
        std::vector<std::size_t> out;
        for (double d : parse_numbers(*v, name + ": " + used)) {
            if (d < 0 || d != std::floor(d)) throw DataError(name + ": " + used + " must hold integers");
            out.push_back(static_cast<std::size_t>(d));
        }
        if (used == total_key && out.size() == 1 && clusters > 1) return even_sizes(out[0], clusters);
        return out;
    };

    spec.k = count("k", 2);
    spec.l = count("l", 2);
    if (spec.k < 1 || spec.l < 1) throw DataError(name + ": k and l must be positive");
    spec.row_sizes = sizes("row_sizes", "rows", spec.k);
    spec.col_sizes = sizes("col_sizes", "cols", spec.l);
    const double diagonal = number("diagonal", 0.7);
    if (auto v = take("block")) {
        spec.block = DenseMatrix(spec.k, spec.l);
        auto rows = text::split(*v, ';');
        if (rows.size() != spec.k) throw DataError(name + ": block needs k rows separated by ';'");
        for (std::size_t r = 0; r < spec.k; ++r) {
            auto nums = parse_numbers(rows[r], name + ": block");
            if (nums.size() != spec.l) throw DataError(name + ": block row needs l entries");
            for (std::size_t c = 0; c < spec.l; ++c) spec.block(r, c) = nums[c];
        }
    } else if (spec.row_sizes.size() == spec.k) {
        spec.block = default_block(spec.row_sizes, spec.l, diagonal);
    }
    spec.noise = number("noise", 0.0);
    spec.drift = number("drift", 0.0);
    spec.seed = count("seed", 0);
    spec.buildings = count("buildings", spec.buildings);
    spec.groups = count("groups", std::min(spec.groups, spec.buildings));
    spec.buildings_per_user = count("buildings_per_user", spec.buildings_per_user);
    spec.flows = count("flows", spec.flows);
    spec.noise_flows = number("noise_flows", spec.noise_flows);
    spec.intensity = number("intensity", spec.intensity);
    spec.jitter = number("jitter", spec.jitter);
    spec.days = count("days", spec.days);
    if (auto v = take("start")) {
        auto t = parse_iso_instant(*v);
        if (!t) throw DataError(name + ": invalid start instant");
        spec.start = *t;
    } else {
        spec.start = std::chrono::sys_days{std::chrono::year{2012} / 3 / 1};
    }
    if (auto v = take("periods")) {
        std::string s = *v;
        std::replace(s.begin(), s.end(), ',', ' ');
        std::istringstream words(s);
        std::string w;
        while (words >> w) {
            SynthPeriod p;
            const auto colon = w.find(':');
            p.label = w.substr(0, colon);
            if (colon != std::string::npos && !text::parse_double(std::string_view(w).substr(colon + 1), p.drift))
                throw DataError(name + ": invalid drift in period '" + w + "'");
            spec.periods.push_back(std::move(p));
        }
    }
    if (!kv.empty()) throw DataError(name + ": unknown key '" + kv.begin()->first + "'");
    try {
        spec.validate();
    } catch (const ContractError& e) {
        throw DataError(name + ": " + e.what());
    }
    return spec;
}

PlantedSpec load_planted_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_planted_spec(in, path.string());
}

DenseMatrix drifted_block(const DenseMatrix& block, double drift) {
    DenseMatrix out(block.rows(), block.cols());
    const std::size_t l = block.cols();
    for (std::size_t r = 0; r < block.rows(); ++r)
        for (std::size_t c = 0; c < l; ++c)
            out(r, c) = (1.0 - drift) * block(r, c) + drift * block(r, (c + l - 1) % l);
    return out;
}

GroundTruth gen_planted_joint(const PlantedSpec& spec) {
    spec.validate();
    const auto pop = make_population(spec);
    const std::size_t n = spec.rows(), m = spec.cols();
    const auto b = drifted_block(spec.block, spec.drift);

    GroundTruth t;
    for (std::size_t x = 0; x < n; ++x) t.row_ids.push_back(to_string(MacAddress{kMacBase + x + 1}));
    for (std::size_t y = 0; y < m; ++y) t.col_ids.push_back(padded("d", y, m, ".example"));
    for (std::size_t i = 0; i < spec.buildings; ++i) t.building_ids.push_back(padded("B", i, spec.buildings));
    t.row_assign = pop.row_assign;
    t.col_assign = pop.col_assign;
    t.building_group = pop.building_group;

    DenseMatrix p(n, m);
    const double uniform = spec.noise / static_cast<double>(n * m);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < m; ++y) {
            const auto rc = t.row_assign[x], cc = t.col_assign[y];
            p(x, y) = (1.0 - spec.noise) * b(rc, cc) /
                          static_cast<double>(spec.row_sizes[rc] * spec.col_sizes[cc]) +
                      uniform;
        }
    t.p = JointDistribution::from_dense(p, t.row_ids, t.col_ids);

    DenseMatrix target(n, m);
    for (std::size_t x = 0; x < n; ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < m; ++y) s += p(x, y);
        for (std::size_t y = 0; y < m; ++y) target(x, y) = p(x, y) / s;
    }
    t.target = JointDistribution::from_dense(target, t.row_ids, t.col_ids);
    return t;
}

SynthTraces gen_synthetic_traces(const PlantedSpec& base_spec, std::size_t period_index) {
    PlantedSpec spec = base_spec;
    SynthPeriod period{"p0", spec.drift};
    if (!spec.periods.empty()) {
        if (period_index >= spec.periods.size()) throw ContractError("period index out of range");
        period = spec.periods[period_index];
    }
    spec.drift = period.drift;

    SynthTraces out;
    out.truth = gen_planted_joint(spec);
    const auto pop = make_population(spec);
    const auto& truth = out.truth;
    const std::size_t n = spec.rows(), m = spec.cols(), nb = spec.buildings;
    Rng rng(mix_seed(spec.seed, 1000 + period_index));

    const Instant begin = spec.start + std::chrono::days(spec.days * period_index);
    const Instant end = begin + std::chrono::days(spec.days);
    const auto ymd_begin = std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(begin)};
    const auto ymd_last = std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(end - Milliseconds(1))};
    if (ymd_begin.year() != ymd_last.year()) throw ContractError("a synthetic period must not cross a year boundary");
    const Instant swap = begin + std::chrono::days(spec.days / 2);

    auto& cfg = out.config;
    cfg.period = Period{period.label, begin, end};
    cfg.year = static_cast<int>(ymd_begin.year());
    cfg.local_nets.add(*Cidr::parse("10.0.0.0/8"));
    cfg.top_domains = m;

    // Profiles drift towards the next building's profile.
    std::vector<DenseMatrix> profile(nb, DenseMatrix(spec.k, spec.l));
    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t i = 0; i < spec.k; ++i)
            for (std::size_t j = 0; j < spec.l; ++j)
                profile[b](i, j) =
                    (1.0 - period.drift) * pop.profiles[b](i, j) + period.drift * pop.profiles[(b + 1) % nb](i, j);

    for (std::size_t b = 0; b < nb; ++b)
        for (std::size_t port = 1; port <= kPortsPerBuilding; ++port)
            out.ports.add(SwitchPort{switch_of(b), static_cast<std::uint32_t>(port)}, truth.building_ids[b]);
    for (std::size_t y = 0; y < m; ++y) out.prefixes.add(prefix_of(domain_peer(y, 0)), truth.col_ids[y]);

    // Leases: one address per user, with pairs of users trading addresses halfway through.
    std::vector<std::size_t> ip_before(n), ip_after(n);
    std::iota(ip_before.begin(), ip_before.end(), 0);
    ip_after = ip_before;
    {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(std::span(order));
        for (std::size_t i = 0; i + 1 < n; i += 2) std::swap(ip_after[order[i]], ip_after[order[i + 1]]);
    }
    for (std::size_t x = 0; x < n; ++x) {
        const MacAddress mac{kMacBase + x + 1};
        out.leases.push_back({user_ip(ip_before[x]), mac, begin - hours(1)});
        if (ip_after[x] != ip_before[x]) out.leases.push_back({user_ip(ip_after[x]), mac, swap});
    }
    auto address_at = [&](std::size_t x, Instant t) { return user_ip(t >= swap ? ip_after[x] : ip_before[x]); };

    // Sessions cycle through the user's buildings in daily slots.
    struct Session {
        Instant start, finish;
    };
    std::vector<std::vector<std::vector<Session>>> sessions(n);  // user -> building slot -> sessions
    const Milliseconds session_len = kSlot - 2 * kMargin;
    for (std::size_t x = 0; x < n; ++x) {
        const auto& mine = pop.user_buildings[x];
        sessions[x].resize(mine.size());
        const MacAddress mac{kMacBase + x + 1};
        const std::uint32_t port = 1 + static_cast<std::uint32_t>(x % kPortsPerBuilding);
        for (std::size_t d = 0; d < spec.days; ++d)
            for (std::size_t s = 0; s < kSlotsPerDay; ++s) {
                const std::size_t which = (d * kSlotsPerDay + s + x) % mine.size();
                const Instant st = begin + std::chrono::days(d) + s * kSlot + kMargin;
                sessions[x][which].push_back({st, st + session_len});
                const Ipv4 sw = switch_of(mine[which]);
                out.sessions.push_back({SessionKind::Start, mac, st, sw, port});
                out.sessions.push_back({SessionKind::End, mac, st + session_len, sw, port});
            }
    }

    // Minutes per (user, building, domain): expm1 of the intensity-scaled conditional.
    const auto& target = truth.target;
    std::vector<double> cond(n * m, 0.0);
    double cmax = 0.0;
    for (const auto& e : target.entries()) {
        const double c = e.p * static_cast<double>(n);
        cond[e.row * m + e.col] = c;
        cmax = std::max(cmax, c);
    }
    std::size_t min_sessions = SIZE_MAX;
    for (const auto& per_user : sessions)
        for (const auto& list : per_user) min_sessions = std::min(min_sessions, list.size());
    const double capacity_min =
        static_cast<double>(min_sessions) * std::chrono::duration<double, std::ratio<60>>(session_len).count();
    double intensity = spec.intensity;
    const double max_intensity = std::log1p(0.9 * capacity_min) / cmax;
    if (intensity <= 0.0) intensity = std::min(40.0, max_intensity);
    if (intensity > max_intensity) throw ContractError("intensity exceeds the session capacity of the period");

    struct Cell {
        std::uint32_t x, slot, y;
        std::int64_t ms;
    };
    std::vector<Cell> cells;
    std::int64_t total_ms = 0;
    for (std::size_t x = 0; x < n; ++x) {
        const auto& mine = pop.user_buildings[x];
        const auto rc = truth.row_assign[x];
        for (std::size_t y = 0; y < m; ++y) {
            const double c = cond[x * m + y];
            if (c <= 0.0) continue;
            const double minutes_total = std::expm1(intensity * c);
            const auto cc = truth.col_assign[y];
            double wsum = 0.0;
            for (auto b : mine) wsum += profile[b](rc, cc);
            // Integer milliseconds per building; the last building takes the rounding remainder.
            const auto ms_total = static_cast<std::int64_t>(std::llround(minutes_total * 60000.0));
            std::int64_t given = 0;
            for (std::size_t i = 0; i < mine.size(); ++i) {
                std::int64_t ms = i + 1 == mine.size()
                                      ? ms_total - given
                                      : static_cast<std::int64_t>(std::llround(
                                            static_cast<double>(ms_total) * profile[mine[i]](rc, cc) / wsum));
                ms = std::min(ms, ms_total - given);
                given += ms;
                if (ms <= 0) continue;
                cells.push_back({static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(i),
                                 static_cast<std::uint32_t>(y), ms});
                total_ms += ms;
            }
        }
    }

    const std::size_t noise_count = static_cast<std::size_t>(std::llround(spec.flows * spec.noise_flows));
    const double main_budget = static_cast<double>(spec.flows > noise_count ? spec.flows - noise_count : 1);
    std::vector<std::uint64_t> domain_flows(m, 0);

    auto emit = [&](Instant st, Instant fin, Ipv4 local, Ipv4 peer, bool outbound) {
        FlowRecord f;
        f.start_ts = st;
        f.finish_ts = fin;
        f.src_ip = outbound ? local : peer;
        f.dst_ip = outbound ? peer : local;
        f.src_port = outbound ? static_cast<std::uint16_t>(32768 + rng.below(28000)) : 443;
        f.dst_port = outbound ? 443 : static_cast<std::uint16_t>(32768 + rng.below(28000));
        f.protocol = 6;
        f.packet_count = 1 + static_cast<std::uint64_t>((fin - st).count() / 1000);
        f.flow_bytes = f.packet_count * (400 + rng.below(1000));
        out.flows.push_back(f);
    };

    for (const auto& cell : cells) {
        const auto& list = sessions[cell.x][cell.slot];
        const std::int64_t capacity = static_cast<std::int64_t>(list.size()) * session_len.count();
        const double share = static_cast<double>(cell.ms) / static_cast<double>(total_ms);
        std::int64_t pieces = std::max<std::int64_t>(1, std::llround(main_budget * share));
        pieces = std::min(pieces, std::max<std::int64_t>(1, cell.ms / 1000));

        // Piece lengths vary with jitter but always sum to the cell total.
        std::vector<double> w(static_cast<std::size_t>(pieces));
        for (double& v : w) v = 1.0 + spec.jitter * (2.0 * rng.uniform() - 1.0);
        const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
        std::vector<std::int64_t> len(w.size());
        std::int64_t assigned = 0;
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += w[i];
            const auto upto = i + 1 == w.size() ? cell.ms
                                                 : static_cast<std::int64_t>(std::floor(
                                                       static_cast<double>(cell.ms) * acc / wsum));
            len[i] = upto - assigned;
            assigned = upto;
        }
        // Spread the free capacity over the gaps in front of each piece.
        std::vector<double> g(w.size() + 1);
        for (double& v : g) v = rng.uniform();
        const double gsum = std::accumulate(g.begin(), g.end(), 0.0);
        const double free = static_cast<double>(capacity - cell.ms);
        std::int64_t pos = 0;
        const Ipv4 peer_base = domain_peer(cell.y, 0);
        for (std::size_t i = 0; i < len.size(); ++i) {
            pos += gsum > 0.0 ? static_cast<std::int64_t>(std::floor(free * g[i] / gsum)) : 0;
            std::int64_t v0 = pos, v1 = pos + len[i];
            pos = v1;
            if (len[i] <= 0) continue;
            const Ipv4 peer{peer_base.value | static_cast<std::uint32_t>(1 + rng.below(254))};
            const bool outbound = rng.below(4) != 0;
            // Map virtual time onto the building's sessions, splitting at their ends.
            while (v0 < v1) {
                const auto s = static_cast<std::size_t>(v0 / session_len.count());
                const std::int64_t s_end = static_cast<std::int64_t>(s + 1) * session_len.count();
                const std::int64_t seg_end = std::min(v1, s_end);
                const Instant st = list[s].start + Milliseconds(v0 - static_cast<std::int64_t>(s) * session_len.count());
                const Instant fin = st + Milliseconds(seg_end - v0);
                emit(st, fin, address_at(cell.x, st), peer, outbound);
                ++domain_flows[cell.y];
                ++out.main_flows;
                v0 = seg_end;
            }
        }
    }

    // Flows the pipeline is expected to drop.
    std::uint64_t min_domain = UINT64_MAX;
    for (auto c : domain_flows) min_domain = std::min(min_domain, c);
    if (min_domain == UINT64_MAX || min_domain == 0) min_domain = 1;
    const std::size_t minor_domains = 3;
    std::vector<std::uint64_t> minor_flows(minor_domains, 0);
    for (std::size_t i = 0; i < minor_domains; ++i)
        out.prefixes.add(Prefix24{(ip(198, 51, 100 + static_cast<std::uint32_t>(i), 0)).value >> 8},
                         "minor" + std::to_string(i) + ".example");
    auto random_instant = [&] {
        const auto d = static_cast<std::int64_t>(rng.below(spec.days * kSlotsPerDay));
        return begin + Milliseconds(d * kSlot.count() + kMargin.count() +
                                    static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(
                                        session_len.count() - 60000))));
    };
    for (std::size_t i = 0; i < noise_count; ++i) {
        const Instant st = random_instant();
        const Instant fin = st + Milliseconds(1000 + static_cast<std::int64_t>(rng.below(59000)));
        const auto y = static_cast<std::size_t>(rng.below(m));
        const auto x = static_cast<std::size_t>(rng.below(n));
        const auto host = static_cast<std::uint32_t>(1 + rng.below(254));
        std::size_t kind = i % 4;
        if (kind == 3) {
            const auto which = i / 4 % minor_domains;
            // Minor domains stay strictly less active than every planted domain.
            if (minor_flows[which] + 1 < min_domain) {
                ++minor_flows[which];
                emit(st, fin, address_at(x, st), ip(198, 51, 100 + static_cast<std::uint32_t>(which), host), true);
                ++out.noise_flows;
                continue;
            }
            kind = 2;
        }
        switch (kind) {
            case 0: emit(st, fin, ip(192, 0, 2, host), domain_peer(y, host), true); break;
            case 1: emit(st, fin, ip(10, 254, 0, host), domain_peer(y, host), true); break;
            default: emit(st, fin, address_at(x, st), ip(203, 0, 113, host), true); break;
        }
        ++out.noise_flows;
    }
    cfg.prefix_threshold = std::max<std::uint64_t>(1, min_domain / 2);

    std::sort(out.flows.begin(), out.flows.end(), [](const FlowRecord& a, const FlowRecord& b) {
        return std::tie(a.start_ts, a.finish_ts, a.src_ip, a.dst_ip, a.src_port, a.dst_port) <
               std::tie(b.start_ts, b.finish_ts, b.src_ip, b.dst_ip, b.src_port, b.dst_port);
    });
    std::sort(out.leases.begin(), out.leases.end(),
              [](const DhcpLease& a, const DhcpLease& b) { return std::tie(a.ts, a.ip) < std::tie(b.ts, b.ip); });
    std::sort(out.sessions.begin(), out.sessions.end(), [](const SessionEvent& a, const SessionEvent& b) {
        return std::tie(a.ts, a.mac, a.kind) < std::tie(b.ts, b.mac, b.kind);
    });
    return out;
}

void write_truth(const SynthTraces& traces, std::ostream& out) {
    const auto& t = traces.truth;
    const auto& c = traces.config;
    nlohmann::ordered_json j;
    j["period"] = c.period.label;
    j["begin"] = format_iso_instant(c.period.begin);
    j["end"] = format_iso_instant(c.period.end);
    j["year"] = c.year;
    j["local_net"] = "10.0.0.0/8";
    j["prefix_threshold"] = c.prefix_threshold;
    j["top_domains"] = c.top_domains;
    j["main_flows"] = traces.main_flows;
    j["noise_flows"] = traces.noise_flows;
    auto pairs = [](const std::vector<std::string>& ids, const std::vector<std::uint32_t>& labels) {
        auto a = nlohmann::ordered_json::array();
        for (std::size_t i = 0; i < ids.size(); ++i) a.push_back({ids[i], labels[i]});
        return a;
    };
    j["rows"] = pairs(t.row_ids, t.row_assign);
    j["cols"] = pairs(t.col_ids, t.col_assign);
    j["buildings"] = pairs(t.building_ids, t.building_group);
    auto p = nlohmann::ordered_json::array();
    for (const auto& e : t.p.entries()) p.push_back({t.row_ids[e.row], t.col_ids[e.col], e.p});
    j["p"] = std::move(p);
    out << j.dump(1) << '\n';
}

void write_synthetic_traces(const SynthTraces& traces, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw DataError("cannot write " + (dir / name).string());
        return f;
    };
    {
        auto f = open("flows.txt");
        for (const auto& r : traces.flows) f << format_flow_record(r) << '\n';
    }
    {
        auto f = open("dhcp.txt");
        for (const auto& r : traces.leases) f << format_dhcp_lease(r) << '\n';
    }
    {
        auto f = open("sessions.txt");
        for (const auto& r : traces.sessions) f << format_session_event(r) << '\n';
    }
    {
        auto f = open("prefixes.txt");
        for (const auto& [prefix, domain] : traces.prefixes.entries()) f << to_string(prefix) << ',' << domain << '\n';
    }
    {
        auto f = open("ports.txt");
        for (const auto& [port, building] : traces.ports.entries())
            f << to_string(port.switch_ip) << ':' << port.port << ',' << building << '\n';
    }
    {
        auto f = open("truth.json");
        write_truth(traces, f);
    }
    {
        // Options for the aggregate subcommand.
        const auto& c = traces.config;
        auto f = open("aggregate.ini");
        f << "[aggregate]\n"
          << "period=" << c.period.label << '\n'
          << "begin=" << format_iso_instant(c.period.begin) << '\n'
          << "end=" << format_iso_instant(c.period.end) << '\n'
          << "year=" << c.year << '\n'
          << "local-net=10.0.0.0/8\n"
          << "prefix-threshold=" << c.prefix_threshold << '\n'
          << "top-domains=" << c.top_domains << '\n';
    }
}

double adjusted_rand_index(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
    if (a.size() != b.size()) throw ContractError("partitions cover different element sets");
    const std::size_t n = a.size();
    if (n < 2) return 1.0;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> joint;
    std::map<std::uint32_t, std::uint64_t> ca, cb;
    for (std::size_t i = 0; i < n; ++i) {
        ++joint[{a[i], b[i]}];
        ++ca[a[i]];
        ++cb[b[i]];
    }
    auto pairs = [](std::uint64_t c) { return static_cast<double>(c) * static_cast<double>(c - 1) / 2.0; };
    double index = 0.0, sa = 0.0, sb = 0.0;
    for (const auto& [key, c] : joint) index += pairs(c);
    for (const auto& [key, c] : ca) sa += pairs(c);
    for (const auto& [key, c] : cb) sb += pairs(c);
    const double expected = sa * sb / pairs(n);
    const double max_index = 0.5 * (sa + sb);
    // Both partitions trivial (all singletons or a single block) and hence equal.
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

std::vector<std::vector<std::uint32_t>> set_partitions(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::uint32_t>> out;
    if (k == 0 || k > n) return out;
    std::vector<std::uint32_t> rgs(n, 0);
    // Depth-first over restricted growth strings: rgs[i] <= 1 + max(rgs[0..i-1]).
    auto rec = [&](auto&& self, std::size_t i, std::uint32_t used) -> void {
        if (n - i < k - used) return;
        if (i == n) {
            if (used == k) out.push_back(rgs);
            return;
        }
        for (std::uint32_t c = 0; c <= used && c < k; ++c) {
            rgs[i] = c;
            self(self, i + 1, c == used ? used + 1 : used);
        }
    };
    rec(rec, 0, 0);
    return out;
}

namespace {

// Mutual information of a dense joint table, computed directly.
double plain_mi(const DenseMatrix& p) {
    std::vector<double> pr(p.rows(), 0.0), pc(p.cols(), 0.0);
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c) {
            pr[r] += p(r, c);
            pc[c] += p(r, c);
        }
    double mi = 0.0;
    for (std::size_t r = 0; r < p.rows(); ++r)
        for (std::size_t c = 0; c < p.cols(); ++c)
            if (p(r, c) > 0.0) mi += p(r, c) * std::log(p(r, c) / (pr[r] * pc[c]));
    return mi;
}

}  // namespace

BruteForceResult brute_force_cocluster(const DenseMatrix& p, std::size_t k, std::size_t l) {
    if (p.rows() > 8 || p.cols() > 8) throw ContractError("brute force is limited to 8 x 8");
    if (k < 1 || l < 1 || k > p.rows() || l > p.cols()) throw ContractError("cluster counts out of range");
    const auto rows = set_partitions(p.rows(), k);
    const auto cols = set_partitions(p.cols(), l);
    const double total_mi = plain_mi(p);
    BruteForceResult best;
    bool have = false;
    DenseMatrix q(k, l);
    for (const auto& ra : rows)
        for (const auto& ca : cols) {
            std::fill(q.values().begin(), q.values().end(), 0.0);
            for (std::size_t r = 0; r < p.rows(); ++r)
                for (std::size_t c = 0; c < p.cols(); ++c) q(ra[r], ca[c]) += p(r, c);
            const double loss = total_mi - plain_mi(q);
            if (!have || loss < best.loss) {
                best = {loss, ra, ca};
                have = true;
            }
        }
    return best;
}

}  // namespace netcc
