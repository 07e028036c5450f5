#include "netcc/trace.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>

#include "text.hpp"

namespace netcc {

namespace {

using namespace std::chrono;

template <class T>
std::optional<T> parse_digits(std::string_view s, std::size_t max_digits) {
    if (s.empty() || s.size() > max_digits) return std::nullopt;
    for (char c : s)
        if (c < '0' || c > '9') return std::nullopt;
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

// HH:MM:SS[.mmm]
std::optional<Milliseconds> parse_clock(std::string_view s) {
    if (s.size() < 8 || s[2] != ':' || s[5] != ':') return std::nullopt;
    auto hh = parse_digits<int>(s.substr(0, 2), 2);
    auto mm = parse_digits<int>(s.substr(3, 2), 2);
    auto ss = parse_digits<int>(s.substr(6, 2), 2);
    if (!hh || !mm || !ss || *hh > 23 || *mm > 59 || *ss > 59) return std::nullopt;
    int ms = 0;
    if (s.size() > 8) {
        if (s[8] != '.') return std::nullopt;
        auto frac = s.substr(9);
        auto v = parse_digits<int>(frac, 3);
        if (!v) return std::nullopt;
        ms = *v;
        for (std::size_t i = frac.size(); i < 3; ++i) ms *= 10;
    }
    return hours(*hh) + minutes(*mm) + seconds(*ss) + Milliseconds(ms);
}

std::optional<Instant> make_instant(int y, int m, int d, Milliseconds clock) {
    if (m < 1 || m > 12 || d < 1 || d > 31) return std::nullopt;
    year_month_day ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) return std::nullopt;
    return Instant{sys_days{ymd}} + clock;
}

template <class T>
std::optional<T> field_uint(std::string_view s, std::uint64_t max) {
    auto v = parse_digits<std::uint64_t>(s, 20);
    if (!v || *v > max) return std::nullopt;
    return static_cast<T>(*v);
}

[[noreturn]] void fail(const char* reason, std::size_t line_no) { throw ParseError(reason, line_no); }

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool valid_token(std::string_view s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '.' || c == '-' || c == '_';
    });
}

}  // namespace

std::optional<Ipv4> parse_ipv4(std::string_view text) {
    std::uint32_t value = 0;
    int octets = 0;
    while (octets < 4) {
        auto dot = text.find('.');
        auto part = text.substr(0, dot);
        auto v = parse_digits<unsigned>(part, 3);
        if (!v || *v > 255) return std::nullopt;
        value = (value << 8) | *v;
        ++octets;
        if (dot == std::string_view::npos) break;
        text.remove_prefix(dot + 1);
    }
    if (octets != 4) return std::nullopt;
    return Ipv4{value};
}

std::optional<Prefix24> parse_prefix24(std::string_view text) {
    if (text.ends_with("/24")) {
        auto ip = parse_ipv4(text.substr(0, text.size() - 3));
        if (!ip || (ip->value & 0xffu) != 0) return std::nullopt;
        return prefix_of(*ip);
    }
    std::uint32_t value = 0;
    int octets = 0;
    for (auto part : text::split(text, '.')) {
        auto v = parse_digits<unsigned>(part, 3);
        if (!v || *v > 255 || octets == 3) return std::nullopt;
        value = (value << 8) | *v;
        ++octets;
    }
    if (octets != 3) return std::nullopt;
    return Prefix24{value};
}

std::optional<MacAddress> parse_mac(std::string_view text) {
    if (text.size() != 17) return std::nullopt;
    const char sep = text[2];
    if (sep != ':' && sep != '-') return std::nullopt;
    std::uint64_t value = 0;
    for (int i = 0; i < 6; ++i) {
        auto part = text.substr(static_cast<std::size_t>(i) * 3, 2);
        if (i < 5 && text[static_cast<std::size_t>(i) * 3 + 2] != sep) return std::nullopt;
        unsigned byte = 0;
        for (char c : part) {
            if (!std::isxdigit(static_cast<unsigned char>(c))) return std::nullopt;
        }
        std::from_chars(part.data(), part.data() + 2, byte, 16);
        value = (value << 8) | byte;
    }
    return MacAddress{value};
}

std::optional<Instant> parse_iso_instant(std::string_view text) {
    if (text.size() < 19 || text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' '))
        return std::nullopt;
    auto y = parse_digits<int>(text.substr(0, 4), 4);
    auto m = parse_digits<int>(text.substr(5, 2), 2);
    auto d = parse_digits<int>(text.substr(8, 2), 2);
    auto clock = parse_clock(text.substr(11));
    if (!y || !m || !d || !clock) return std::nullopt;
    return make_instant(*y, *m, *d, *clock);
}

std::optional<Instant> parse_netflow_instant(std::string_view text, int year) {
    if (text.size() < 13 || text[4] != '.') return std::nullopt;
    auto m = parse_digits<int>(text.substr(0, 2), 2);
    auto d = parse_digits<int>(text.substr(2, 2), 2);
    auto clock = parse_clock(text.substr(5));
    if (!m || !d || !clock) return std::nullopt;
    return make_instant(year, *m, *d, *clock);
}

std::string to_string(Ipv4 ip) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", ip.value >> 24, (ip.value >> 16) & 0xffu,
                  (ip.value >> 8) & 0xffu, ip.value & 0xffu);
    return buf;
}

std::string to_string(Prefix24 prefix) {
    char buf[12];
    std::snprintf(buf, sizeof buf, "%u.%u.%u", (prefix.value >> 16) & 0xffu,
                  (prefix.value >> 8) & 0xffu, prefix.value & 0xffu);
    return buf;
}

std::string to_string(MacAddress mac) {
    char buf[18];
    const auto v = mac.value;
    std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                  static_cast<unsigned>((v >> 40) & 0xff), static_cast<unsigned>((v >> 32) & 0xff),
                  static_cast<unsigned>((v >> 24) & 0xff), static_cast<unsigned>((v >> 16) & 0xff),
                  static_cast<unsigned>((v >> 8) & 0xff), static_cast<unsigned>(v & 0xff));
    return buf;
}

namespace {

struct Civil {
    int year;
    unsigned month, day;
    long long hour, minute, second, milli;
};

Civil civil(Instant t) {
    auto day_point = floor<days>(t);
    year_month_day ymd{day_point};
    auto rest = t - day_point;
    long long ms = rest.count();
    return {static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
            static_cast<unsigned>(ymd.day()), ms / 3'600'000, ms / 60'000 % 60, ms / 1000 % 60,
            ms % 1000};
}

}  // namespace

std::string format_iso_instant(Instant t) {
    auto c = civil(t);
    char buf[96];
    if (c.milli)
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld.%03lld", c.year, c.month,
                      c.day, c.hour, c.minute, c.second, c.milli);
    else
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lld", c.year, c.month, c.day,
                      c.hour, c.minute, c.second);
    return buf;
}

std::string format_netflow_instant(Instant t) {
    auto c = civil(t);
    char buf[80];
    std::snprintf(buf, sizeof buf, "%02u%02u.%02lld:%02lld:%02lld.%03lld", c.month, c.day, c.hour,
                  c.minute, c.second, c.milli);
    return buf;
}

FlowRecord parse_flow_record(std::string_view line, int year, std::size_t line_no) {
    auto f = text::split_fields(line);
    if (f.size() != 10) fail("expected 10 fields", line_no);
    FlowRecord r;
    auto start = parse_netflow_instant(f[0], year);
    auto finish = parse_netflow_instant(f[1], year);
    if (!start || !finish) fail("invalid timestamp", line_no);
    r.start_ts = *start;
    r.finish_ts = *finish;
    auto src = parse_ipv4(f[2]);
    auto dst = parse_ipv4(f[4]);
    if (!src || !dst) fail("invalid ip", line_no);
    r.src_ip = *src;
    r.dst_ip = *dst;
    auto sport = field_uint<std::uint16_t>(f[3], 65535);
    auto dport = field_uint<std::uint16_t>(f[5], 65535);
    if (!sport || !dport) fail("invalid port", line_no);
    r.src_port = *sport;
    r.dst_port = *dport;
    auto proto = field_uint<std::uint8_t>(f[6], 255);
    auto tos = field_uint<std::uint8_t>(f[7], 255);
    if (!proto) fail("invalid protocol", line_no);
    if (!tos) fail("invalid tos", line_no);
    r.protocol = *proto;
    r.tos = *tos;
    auto packets = field_uint<std::uint64_t>(f[8], UINT64_MAX);
    auto bytes = field_uint<std::uint64_t>(f[9], UINT64_MAX);
    if (!packets || !bytes) fail("invalid counter", line_no);
    r.packet_count = *packets;
    r.flow_bytes = *bytes;
    if (r.finish_ts < r.start_ts) fail("non-monotone interval", line_no);
    if (r.flow_bytes > 0 && r.packet_count == 0) fail("bytes without packets", line_no);
    return r;
}

SessionEvent parse_session_event(std::string_view line, std::size_t line_no) {
    auto f = text::split_fields(line);
    if (f.size() != 5) fail("expected 5 fields", line_no);
    SessionEvent e;
    auto kind = lowercase(f[0]);
    if (kind == "start")
        e.kind = SessionKind::Start;
    else if (kind == "end")
        e.kind = SessionKind::End;
    else
        fail("invalid event kind", line_no);
    auto mac = parse_mac(f[1]);
    if (!mac) fail("invalid mac", line_no);
    e.mac = *mac;
    auto ts = parse_iso_instant(f[2]);
    if (!ts) fail("invalid timestamp", line_no);
    e.ts = *ts;
    auto ip = parse_ipv4(f[3]);
    if (!ip) fail("invalid ip", line_no);
    e.switch_ip = *ip;
    auto port = field_uint<std::uint32_t>(f[4], UINT32_MAX);
    if (!port) fail("invalid port", line_no);
    e.switch_port = *port;
    return e;
}

DhcpLease parse_dhcp_lease(std::string_view line, std::size_t line_no) {
    auto f = text::split_fields(line);
    if (f.size() != 3) fail("expected 3 fields", line_no);
    DhcpLease l;
    auto ip = parse_ipv4(f[0]);
    if (!ip) fail("invalid ip", line_no);
    l.ip = *ip;
    auto mac = parse_mac(f[1]);
    if (!mac) fail("invalid mac", line_no);
    l.mac = *mac;
    auto ts = parse_iso_instant(f[2]);
    if (!ts) fail("invalid timestamp", line_no);
    l.ts = *ts;
    return l;
}

std::string format_flow_record(const FlowRecord& r) {
    std::string out;
    out.reserve(96);
    out += format_netflow_instant(r.start_ts);
    out += " | ";
    out += format_netflow_instant(r.finish_ts);
    out += " | ";
    out += to_string(r.src_ip);
    out += " | ";
    out += std::to_string(r.src_port);
    out += " | ";
    out += to_string(r.dst_ip);
    out += " | ";
    out += std::to_string(r.dst_port);
    out += " | ";
    out += std::to_string(r.protocol);
    out += " | ";
    out += std::to_string(r.tos);
    out += " | ";
    out += std::to_string(r.packet_count);
    out += " | ";
    out += std::to_string(r.flow_bytes);
    return out;
}

std::string format_session_event(const SessionEvent& e) {
    return std::string(e.kind == SessionKind::Start ? "start" : "end") + "," + to_string(e.mac) + "," +
           format_iso_instant(e.ts) + "," + to_string(e.switch_ip) + "," + std::to_string(e.switch_port);
}

std::string format_dhcp_lease(const DhcpLease& l) {
    return to_string(l.ip) + "," + to_string(l.mac) + "," + format_iso_instant(l.ts);
}

void for_each_record(std::istream& in,
                     const std::function<void(std::string_view, std::size_t)>& fn) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto view = text::trim(line);
        if (view.empty() || view.front() == '#') continue;
        fn(view, line_no);
    }
}

void PrefixDomainMap::add(Prefix24 prefix, std::string domain) {
    auto [it, inserted] = entries_.emplace(prefix, domain);
    if (!inserted && it->second != domain)
        throw ContractError("prefix " + to_string(prefix) + " maps to both " + it->second + " and " +
                            domain);
}

const std::string* PrefixDomainMap::find(Prefix24 prefix) const {
    auto it = entries_.find(prefix);
    return it == entries_.end() ? nullptr : &it->second;
}

PrefixDomainMap PrefixDomainMap::load(std::istream& in) {
    PrefixDomainMap map;
    for_each_record(in, [&](std::string_view line, std::size_t line_no) {
        auto f = text::split_fields(line);
        if (f.size() != 2) fail("expected prefix,domain", line_no);
        auto prefix = parse_prefix24(f[0]);
        if (!prefix) fail("invalid prefix", line_no);
        auto domain = lowercase(f[1]);
        if (!valid_token(domain)) fail("invalid domain", line_no);
        try {
            map.add(*prefix, std::move(domain));
        } catch (const ContractError&) {
            fail("prefix maps to two domains", line_no);
        }
    });
    return map;
}

void PortBuildingMap::add(SwitchPort port, std::string building) {
    auto [it, inserted] = entries_.emplace(port, building);
    if (!inserted && it->second != building)
        throw ContractError("switch port " + to_string(port.switch_ip) + ":" + std::to_string(port.port) +
                            " maps to two buildings");
}

const std::string* PortBuildingMap::find(SwitchPort port) const {
    auto it = entries_.find(port);
    return it == entries_.end() ? nullptr : &it->second;
}

PortBuildingMap PortBuildingMap::load(std::istream& in) {
    PortBuildingMap map;
    for_each_record(in, [&](std::string_view line, std::size_t line_no) {
        auto f = text::split_fields(line);
        if (f.size() != 2) fail("expected switch_ip:port,building", line_no);
        auto colon = f[0].rfind(':');
        if (colon == std::string_view::npos) fail("expected switch_ip:port", line_no);
        auto ip = parse_ipv4(f[0].substr(0, colon));
        auto port = field_uint<std::uint32_t>(f[0].substr(colon + 1), UINT32_MAX);
        if (!ip || !port) fail("invalid switch port", line_no);
        if (!valid_token(f[1])) fail("invalid building id", line_no);
        try {
            map.add(SwitchPort{*ip, *port}, std::string(f[1]));
        } catch (const ContractError&) {
            fail("switch port maps to two buildings", line_no);
        }
    });
    return map;
}

}  // namespace netcc
