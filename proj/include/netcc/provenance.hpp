#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace netcc {

std::string sha256_hex(std::string_view data);
std::string sha256_file(const std::filesystem::path& path);

// Comment header written at the top of every output file. It carries no
// timestamps so identical runs produce identical bytes.
struct Provenance {
    std::string tool = "netcc";
    std::string version = NETCC_VERSION;
    std::string config_hash;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, digest

    void add_input(const std::filesystem::path& path);
    void set_config(std::string_view canonical_config);
    void write(std::ostream& out, std::string_view comment = "#") const;
};

}  // namespace netcc
