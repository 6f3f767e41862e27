#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tkg {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Text that does not conform to one of the supported input grammars.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

    /// 1-based line number, 0 when the input has no line structure.
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A value that violates a domain invariant (relative IRI, literal subject, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A name that is not part of the bundled schema.org vocabulary.
class UnknownName : public Error {
public:
    explicit UnknownName(const std::string& name)
        : Error("unknown schema.org name: " + name), name_(name) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

}  // namespace tkg
