#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcc {

// Precondition violated by the caller (shape mismatch, unnormalized input, ...).
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Input data does not satisfy a documented format or invariant.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A single malformed trace record. line is 1-based; 0 when unknown.
class ParseError : public DataError {
public:
    ParseError(std::string reason, std::size_t line = 0)
        : DataError(line ? "line " + std::to_string(line) + ": " + reason : reason),
          reason_(std::move(reason)), line_(line) {}

    const std::string& reason() const noexcept { return reason_; }
    std::size_t line() const noexcept { return line_; }

private:
    std::string reason_;
    std::size_t line_;
};

// A row or column cluster lost all of its members.
class EmptyCluster : public std::runtime_error {
public:
    EmptyCluster(bool row_side, std::size_t cluster)
        : std::runtime_error(std::string(row_side ? "row" : "column") + " cluster " +
                             std::to_string(cluster) + " is empty"),
          row_side_(row_side), cluster_(cluster) {}

    bool row_side() const noexcept { return row_side_; }
    std::size_t cluster() const noexcept { return cluster_; }

private:
    bool row_side_;
    std::size_t cluster_;
};

// The comparison period shares no mass with the reference entities.
class EmptyOverlap : public DataError {
public:
    using DataError::DataError;
};

}  // namespace netcc
