#pragma once

#include <stdexcept>
#include <string>

namespace gestgen {

/// Process exit codes shared by every subcommand of the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kIo = 3,
  kNumerical = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Input that violates a documented invariant or file format.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ExitCode::kValidation, what) {}
};

/// Malformed text at a known line of an input file.
class ParseError : public ValidationError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public ValidationError {
 public:
  explicit ConfigError(const std::string& what) : ValidationError(what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kIo, what) {}
};

/// Training produced a non-finite loss.
class NumericalAbort : public Error {
 public:
  explicit NumericalAbort(const std::string& what)
      : Error(ExitCode::kNumerical, what) {}
};

/// A vector was too short to define a direction. Retargeting turns this into
/// a hold of the previous joint value.
class DegenerateGeometry : public std::domain_error {
 public:
  explicit DegenerateGeometry(const std::string& what)
      : std::domain_error(what) {}
};

}  // namespace gestgen
