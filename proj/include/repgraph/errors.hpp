#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace repgraph {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Precondition on a value (sizes, ranges, N too small).
class DomainError : public Error {
public:
    using Error::Error;
};

// Payload shapes or container sizes that do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Malformed input file. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Two declared-distinct values at distance <= tie tolerance, etc.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

// A k-NNL / k-MST round cannot connect all nodes.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

class EnumerationTooLargeError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    using Error::Error;
};

// Null variance of a statistic that has to be standardized.
class DegenerateNullError : public Error {
public:
    DegenerateNullError(const std::string& statistic, double variance)
        : Error("degenerate permutation null: Var(" + statistic + ") = " +
                std::to_string(variance) +
                "; the similarity graph lacks degree variety or all observations coincide"),
          statistic_(statistic) {}
    const std::string& statistic() const noexcept { return statistic_; }

private:
    std::string statistic_;
};

}  // namespace repgraph
