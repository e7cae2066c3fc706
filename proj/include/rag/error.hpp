#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rag {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
public:
    EmptyInput() : Error("aggregation over an empty input") {}
};

class OutOfDomain : public Error {
public:
    using Error::Error;
};

class MissingAxis : public Error {
public:
    using Error::Error;
};

class SchemaMismatch : public Error {
public:
    using Error::Error;
};

/// Raised by the feasibility pipeline; `stage` names the stage that could not
/// find one of its inputs.
class MissingAttribute : public Error {
public:
    MissingAttribute(std::string stage, std::string attribute)
        : Error("stage '" + stage + "' is missing input '" + attribute + "'"),
          stage_(std::move(stage)),
          attribute_(std::move(attribute)) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& attribute() const noexcept { return attribute_; }

private:
    std::string stage_;
    std::string attribute_;
};

class CycleError : public Error {
public:
    using Error::Error;
};

class UnknownTarget : public Error {
public:
    using Error::Error;
};

class UnknownConsequence : public Error {
public:
    using Error::Error;
};

class UnknownEnumerate : public Error {
public:
    using Error::Error;
};

/// Profile document problem; `path` is a JSON-pointer-like location.
class ProfileError : public Error {
public:
    ProfileError(std::string path, const std::string& message)
        : Error(path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, std::string path, const std::string& message)
        : Error(describe(line, column, path, message)),
          line_(line),
          column_(column),
          path_(std::move(path)) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& path() const noexcept { return path_; }

private:
    static std::string describe(std::size_t line, std::size_t column, const std::string& path,
                                const std::string& message) {
        std::string out = "line " + std::to_string(line) + ", column " + std::to_string(column);
        if (!path.empty()) out += " (" + path + ")";
        return out + ": " + message;
    }

    std::size_t line_;
    std::size_t column_;
    std::string path_;
};

class VersionError : public ParseError {
public:
    explicit VersionError(const std::string& found)
        : ParseError(0, 0, "/format_version", "unsupported format_version '" + found + "'") {}
};

}  // namespace rag
