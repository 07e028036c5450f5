#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netcc/error.hpp"

namespace netcc {

using Milliseconds = std::chrono::milliseconds;
using Instant = std::chrono::sys_time<Milliseconds>;

struct Ipv4 {
    std::uint32_t value = 0;

    auto operator<=>(const Ipv4&) const = default;
};

// The first 24 bits of an address, stored right-aligned (a.b.c -> 0x00aabbcc).
struct Prefix24 {
    std::uint32_t value = 0;

    auto operator<=>(const Prefix24&) const = default;
};

inline Prefix24 prefix_of(Ipv4 ip) { return Prefix24{ip.value >> 8}; }

struct MacAddress {
    std::uint64_t value = 0;  // low 48 bits

    auto operator<=>(const MacAddress&) const = default;
};

struct FlowRecord {
    Instant start_ts{};
    Instant finish_ts{};
    Ipv4 src_ip;
    std::uint16_t src_port = 0;
    Ipv4 dst_ip;
    std::uint16_t dst_port = 0;
    std::uint8_t protocol = 0;
    std::uint8_t tos = 0;  // carried for fidelity, not used downstream
    std::uint64_t packet_count = 0;
    std::uint64_t flow_bytes = 0;

    Milliseconds duration() const { return finish_ts - start_ts; }

    bool operator==(const FlowRecord&) const = default;
};

enum class SessionKind { Start, End };

struct SessionEvent {
    SessionKind kind = SessionKind::Start;
    MacAddress mac;
    Instant ts{};
    Ipv4 switch_ip;
    std::uint32_t switch_port = 0;

    bool operator==(const SessionEvent&) const = default;
};

struct DhcpLease {
    Ipv4 ip;
    MacAddress mac;
    Instant ts{};

    bool operator==(const DhcpLease&) const = default;
};

struct SwitchPort {
    Ipv4 switch_ip;
    std::uint32_t port = 0;

    auto operator<=>(const SwitchPort&) const = default;
};

// Scalar field parsers. They return nullopt instead of throwing.
std::optional<Ipv4> parse_ipv4(std::string_view text);
std::optional<Prefix24> parse_prefix24(std::string_view text);  // "a.b.c" or "a.b.c.0/24"
std::optional<MacAddress> parse_mac(std::string_view text);
std::optional<Instant> parse_iso_instant(std::string_view text);  // YYYY-MM-DDTHH:MM:SS[.mmm]
// Netflow timestamps carry no year: MMDD.HH:MM:SS[.mmm].
std::optional<Instant> parse_netflow_instant(std::string_view text, int year);

std::string to_string(Ipv4 ip);
std::string to_string(Prefix24 prefix);
std::string to_string(MacAddress mac);
std::string format_iso_instant(Instant t);
std::string format_netflow_instant(Instant t);

// Record parsers throw ParseError (and nothing else) on malformed input.
// Fields are separated by '|' when the line contains one, otherwise by ','.
FlowRecord parse_flow_record(std::string_view line, int year, std::size_t line_no = 0);
SessionEvent parse_session_event(std::string_view line, std::size_t line_no = 0);
DhcpLease parse_dhcp_lease(std::string_view line, std::size_t line_no = 0);

std::string format_flow_record(const FlowRecord& flow);
std::string format_session_event(const SessionEvent& event);
std::string format_dhcp_lease(const DhcpLease& lease);

// Calls fn(line, line_no) for every line that is neither blank nor a '#' comment.
void for_each_record(std::istream& in,
                     const std::function<void(std::string_view, std::size_t)>& fn);

class PrefixDomainMap {
public:
    // Throws ContractError if the prefix already maps to a different domain.
    void add(Prefix24 prefix, std::string domain);
    const std::string* find(Prefix24 prefix) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<Prefix24, std::string>& entries() const { return entries_; }

    // Lines of "prefix,domain". Domains are lowercased.
    static PrefixDomainMap load(std::istream& in);

private:
    std::map<Prefix24, std::string> entries_;
};

class PortBuildingMap {
public:
    void add(SwitchPort port, std::string building);
    const std::string* find(SwitchPort port) const;
    std::size_t size() const { return entries_.size(); }
    const std::map<SwitchPort, std::string>& entries() const { return entries_; }

    // Lines of "switch_ip:port,building".
    static PortBuildingMap load(std::istream& in);

private:
    std::map<SwitchPort, std::string> entries_;
};

}  // namespace netcc
