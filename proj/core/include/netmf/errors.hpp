#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace netmf {

// Broad failure classes. The CLI maps each one to its own exit status.
enum class ErrorKind {
  kUsage,        // bad parameters or flag combinations
  kIo,           // file missing, unreadable or unwritable
  kValidation,   // malformed input data or violated input invariant
  kConvergence,  // an iterative method did not reach its tolerance
  kCapacity,     // problem too large for the requested (dense) path
  kInternal,     // broken internal invariant
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(ErrorKind::kUsage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::kIo, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::kValidation, what) {}
};

// Input text that does not parse. Reported as a validation failure.
class FormatError : public ValidationError {
 public:
  FormatError(const std::string& what, std::size_t line)
      : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(ErrorKind::kConvergence, what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what) : Error(ErrorKind::kCapacity, what) {}
};

class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ErrorKind::kInternal, what) {}
};

// Writes "netmf: warning: <msg>" to stderr unless warnings are silenced.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled) noexcept;

}  // namespace netmf
