#pragma once

#include <stdexcept>
#include <string>

namespace ckg {

// File could not be opened, read, or written.
struct IoFailure : std::runtime_error {
    explicit IoFailure(const std::string& what) : std::runtime_error(what) {}
};

// Input violates its declared schema (missing column, bad reference, duplicate key, ...).
struct SchemaViolation : std::runtime_error {
    explicit SchemaViolation(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownNode : std::runtime_error {
    explicit UnknownNode(const std::string& what) : std::runtime_error(what) {}
};

// Graph too small for the requested statistic (N == 0, or N < 2 for ratios over N-1).
struct DegenerateGraph : std::runtime_error {
    explicit DegenerateGraph(const std::string& what) : std::runtime_error(what) {}
};

struct UnknownColumn : std::runtime_error {
    explicit UnknownColumn(const std::string& what) : std::runtime_error(what) {}
};

struct NonFinite : std::runtime_error {
    explicit NonFinite(const std::string& what) : std::runtime_error(what) {}
};

// Fewer than two usable observation pairs.
struct InsufficientData : std::runtime_error {
    explicit InsufficientData(const std::string& what) : std::runtime_error(what) {}
};

// A rank vector is constant, so the correlation is undefined.
struct DegenerateColumn : std::runtime_error {
    explicit DegenerateColumn(const std::string& what) : std::runtime_error(what) {}
};

struct BadKernel : std::runtime_error {
    explicit BadKernel(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::runtime_error {
    explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct OutOfRange : std::runtime_error {
    explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyScene : std::runtime_error {
    explicit EmptyScene(const std::string& what) : std::runtime_error(what) {}
};

// A grounded prompt was requested without any causal context to inject.
struct MissingContext : std::runtime_error {
    explicit MissingContext(const std::string& what) : std::runtime_error(what) {}
};

// Transport or protocol failure talking to an answer model.
struct ClientFailure : std::runtime_error {
    explicit ClientFailure(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ckg
