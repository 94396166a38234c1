#pragma once

#include <stdexcept>
#include <string>

namespace lbdx {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input record does not conform to the corpus schema.
class SchemaError : public Error {
public:
    SchemaError(std::string source, std::size_t line, std::string field, const std::string &what)
        : Error(source + ":" + std::to_string(line) + ": field '" + field + "': " + what),
          source_(std::move(source)), line_(line), field_(std::move(field)) {}

    const std::string &source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }
    const std::string &field() const noexcept { return field_; }

private:
    std::string source_;
    std::size_t line_;
    std::string field_;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A token, document, or entry point that the caller asked for does not exist.
class NotFound : public Error {
public:
    using Error::Error;
};

}  // namespace lbdx
