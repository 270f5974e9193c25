#pragma once

#include <stdexcept>
#include <string>

namespace cmm {

enum class ErrorCategory {
  Config,       // malformed or invalid input
  Instability,  // steady state required but the drift matrix is unstable
  Numerical,    // solver / integrator / quadrature failure
};

/// Base class of every error thrown by the library. The category decides the
/// CLI exit code; the stage names the pipeline step that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string stage, const std::string& message)
      : std::runtime_error(stage.empty() ? message : stage + ": " + message),
        category_(category),
        stage_(std::move(stage)) {}

  ErrorCategory category() const noexcept { return category_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  ErrorCategory category_;
  std::string stage_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, int line = 0)
      : Error(ErrorCategory::Config, "config",
              line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

class InstabilityError : public Error {
 public:
  InstabilityError(std::string stage, const std::string& message)
      : Error(ErrorCategory::Instability, std::move(stage), message) {}
};

class NumericalError : public Error {
 public:
  NumericalError(std::string stage, const std::string& message)
      : Error(ErrorCategory::Numerical, std::move(stage), message) {}
};

inline int exit_code(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::Config: return 2;
    case ErrorCategory::Instability: return 3;
    case ErrorCategory::Numerical: return 4;
  }
  return 1;
}

}  // namespace cmm
