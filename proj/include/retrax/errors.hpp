#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace retrax {

// Base for every failure the library reports. The CLI maps UsageError to
// exit code 1 and everything else derived from Error to exit code 2.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class UsageError : public Error {
  public:
    using Error::Error;
};

/// Malformed record. `field()` names the offending field when known and
/// `line()` is the 1-based line number for multi-line inputs (0 if n/a).
class ParseError : public Error {
  public:
    ParseError(std::string field, const std::string& what, std::size_t line = 0)
        : Error(format(field, what, line)), field_(std::move(field)), detail_(what), line_(line) {}

    const std::string& field() const { return field_; }
    const std::string& detail() const { return detail_; }
    std::size_t line() const { return line_; }

  private:
    static std::string format(const std::string& field, const std::string& what, std::size_t line) {
        std::string msg = "parse error";
        if (line != 0) msg += " at line " + std::to_string(line);
        if (!field.empty()) msg += " in field '" + field + "'";
        return msg + ": " + what;
    }

    std::string field_;
    std::string detail_;
    std::size_t line_;
};

class ValidationError : public Error {
  public:
    ValidationError(std::string field, const std::string& what)
        : Error("validation error in field '" + field + "': " + what), field_(std::move(field)), detail_(what) {}

    const std::string& field() const { return field_; }
    const std::string& detail() const { return detail_; }

  private:
    std::string field_;
    std::string detail_;
};

class RangeError : public Error {
  public:
    using Error::Error;
};

class DegeneratePoseError : public Error {
  public:
    using Error::Error;
};

class InsufficientMotionError : public Error {
  public:
    using Error::Error;
};

class WrongDirectionError : public Error {
  public:
    using Error::Error;
};

class ConfigError : public Error {
  public:
    using Error::Error;
};

class StreamOrderError : public Error {
  public:
    using Error::Error;
};

class SessionClosedError : public Error {
  public:
    using Error::Error;
};

class ChannelUnavailableError : public Error {
  public:
    using Error::Error;
};

class VersionError : public Error {
  public:
    using Error::Error;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

}  // namespace retrax
