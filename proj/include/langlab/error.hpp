#pragma once

#include <stdexcept>
#include <string>

namespace langlab {

// Exit codes shared by the CLI and the error hierarchy.
enum class ExitCode : int {
  ok = 0,
  internal = 1,
  usage = 2,
  missing_input = 3,
  bad_data = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

// Malformed external input (syntax level).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(ExitCode::bad_data, msg) {}
};

// Well-formed input violating a domain invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& msg)
      : Error(ExitCode::bad_data, msg) {}
};

// Missing or unreadable file / upstream artifact.
class IoError : public Error {
 public:
  explicit IoError(const std::string& msg)
      : Error(ExitCode::missing_input, msg) {}
};

// Bad configuration or violated caller contract.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(ExitCode::usage, msg) {}
};

}  // namespace langlab
