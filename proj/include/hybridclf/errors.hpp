#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace hybridclf {

/// Base of every error raised by the library. `kind()` is a short stable
/// identifier used by the CLI when it reports failures.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

class EmptyCorpusError : public Error {
public:
    explicit EmptyCorpusError(const std::string& message) : Error("empty_corpus", message) {}
};

class RowError : public Error {
public:
    RowError(std::size_t line, const std::string& message)
        : Error("row", "line " + std::to_string(line) + ": " + message), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class StratificationError : public Error {
public:
    explicit StratificationError(const std::string& message)
        : Error("infeasible_stratification", message) {}
};

class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& message) : Error("shape", message) {}
};

class NumericFault : public Error {
public:
    explicit NumericFault(const std::string& message) : Error("numeric_fault", message) {}
};

class DegenerateInputError : public Error {
public:
    explicit DegenerateInputError(const std::string& message)
        : Error("degenerate_input", message) {}
};

/// Malformed file content. Carries the 1-based line or the 0-based byte
/// offset of the problem when one is known.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& message) : Error("format", message) {}

    static FormatError at_line(std::size_t line, const std::string& message) {
        FormatError e("line " + std::to_string(line) + ": " + message);
        e.line_ = line;
        return e;
    }

    static FormatError at_byte(std::size_t offset, const std::string& message) {
        FormatError e("byte " + std::to_string(offset) + ": " + message);
        e.byte_offset_ = offset;
        return e;
    }

    std::optional<std::size_t> line() const noexcept { return line_; }
    std::optional<std::size_t> byte_offset() const noexcept { return byte_offset_; }

private:
    std::optional<std::size_t> line_;
    std::optional<std::size_t> byte_offset_;
};

class VersionError : public Error {
public:
    explicit VersionError(const std::string& message) : Error("version", message) {}
};

class UndefinedMetricError : public Error {
public:
    explicit UndefinedMetricError(const std::string& message)
        : Error("undefined_metric", message) {}
};

}  // namespace hybridclf
