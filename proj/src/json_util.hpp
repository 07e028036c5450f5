#pragma once

#include <json.hpp>

#include "netcc/provenance.hpp"

namespace netcc {

inline nlohmann::ordered_json provenance_json(const Provenance& p) {
    nlohmann::ordered_json j;
    j["tool"] = p.tool;
    j["version"] = p.version;
    if (!p.config_hash.empty()) j["config"] = "sha256:" + p.config_hash;
    auto inputs = nlohmann::ordered_json::array();
    for (const auto& [path, digest] : p.inputs) inputs.push_back({{"path", path}, {"sha256", digest}});
    j["inputs"] = std::move(inputs);
    return j;
}

}  // namespace netcc
