#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace openmax {

// Base of every error raised by the library. The CLI maps ParseError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed text input (activation tables, model files).
class ParseError : public Error {
public:
    using Error::Error;
};

// Arguments that break an operation's precondition or a type invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
public:
    DimensionMismatch(const std::string& what, std::size_t expected, std::size_t actual)
        : InvalidArgument(what + ": expected dimension " + std::to_string(expected) + ", got " +
                          std::to_string(actual)),
          expected_(expected),
          actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

enum class FitErrorKind {
    degenerate_tail,
    too_few_samples,
    no_bracket,
    class_underpopulated,
};

const char* to_string(FitErrorKind kind) noexcept;

// Failure while fitting a tail model. When raised from fit_openmax the
// failing class index is attached.
class FitError : public Error {
public:
    FitError(FitErrorKind kind, const std::string& detail,
             std::optional<std::size_t> class_index = std::nullopt);

    FitErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> class_index() const noexcept { return class_index_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    FitErrorKind kind_;
    std::string detail_;
    std::optional<std::size_t> class_index_;
};

// Model file problems: schema violations, invariant violations, versions.
class ModelFormatError : public ParseError {
public:
    using ParseError::ParseError;
};

}  // namespace openmax
