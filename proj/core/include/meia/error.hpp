#pragma once

#include <stdexcept>
#include <string>

namespace meia {

// Base class for every error raised by the library. The `kind()` string is
// stable and machine-parsable; the CLI prints it as the first token of its
// one-line failure message.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidObservation : public Error {
public:
    explicit InvalidObservation(const std::string& m) : Error("invalid-observation", m) {}
};

class NoObservation : public Error {
public:
    explicit NoObservation(const std::string& m) : Error("no-observation", m) {}
};

class InvalidTarget : public Error {
public:
    explicit InvalidTarget(const std::string& m) : Error("invalid-target", m) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& m) : Error("validation-error", m) {}
};

// JSON / document parse failure. `line` is 1-based, 0 when unknown;
// `path` names the offending field (e.g. "objects[3].position").
class ParseError : public Error {
public:
    ParseError(const std::string& m, int line = 0, std::string path = {})
        : Error("parse-error", m), line_(line), path_(std::move(path)) {}

    int line() const noexcept { return line_; }
    const std::string& path() const noexcept { return path_; }

private:
    int line_;
    std::string path_;
};

// Failure to parse planner output under the plan grammar.
class PlanParseError : public Error {
public:
    PlanParseError(int line, std::string reason)
        : Error("plan-parse-error", "line " + std::to_string(line) + ": " + reason),
          line_(line), reason_(std::move(reason)) {}

    int line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    int line_;
    std::string reason_;
};

class BackendError : public Error {
public:
    explicit BackendError(const std::string& m) : Error("backend-error", m) {}
};

class OracleError : public Error {
public:
    explicit OracleError(const std::string& m) : Error("oracle-error", m) {}
};

class InvalidCase : public Error {
public:
    explicit InvalidCase(const std::string& m) : Error("invalid-case", m) {}
};

}  // namespace meia
