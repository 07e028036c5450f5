#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "netcc/pipeline.hpp"
#include "netcc/provenance.hpp"

namespace netcc {

// A matrix is stored as two files sharing a base path:
//   <base>.triples  "row_id,col_id,value" per line, online minutes
//   <base>.header   period label and the row/column orderings
void write_matrix(const ContingencyMatrix& m, std::ostream& triples, std::ostream& header,
                  const Provenance* provenance = nullptr);
ContingencyMatrix read_matrix(std::istream& triples, std::istream& header,
                              const std::string& name = "matrix");

void write_matrix(const ContingencyMatrix& m, const std::filesystem::path& base,
                  const Provenance* provenance = nullptr);
ContingencyMatrix read_matrix(const std::filesystem::path& base);

struct MatrixHeader {
    std::string period;
    std::vector<std::string> row_ids;
    std::vector<std::string> col_ids;
};

MatrixHeader read_matrix_header(std::istream& header, const std::string& name = "header");
MatrixHeader read_matrix_header(const std::filesystem::path& base);

}  // namespace netcc
