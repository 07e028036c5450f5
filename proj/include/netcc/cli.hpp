#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "netcc/pipeline.hpp"

namespace netcc {

// Exit codes: 0 success, 1 usage error, 2 data error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// A period directory holds global.{triples,header}, one matrix per building
// under buildings/, and stats.json.
struct PeriodMatrices {
    ContingencyMatrix global;
    std::map<std::string, ContingencyMatrix> by_building;
};

PeriodMatrices read_period_dir(const std::filesystem::path& dir);

}  // namespace netcc
