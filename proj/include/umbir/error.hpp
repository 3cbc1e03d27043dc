#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace umbir {

// Process exit codes used by the CLI.
enum class ExitCode : int {
  ok = 0,
  usage = 1,
  config = 2,
  data = 3,
  numerical = 4,
};

class Error : public std::runtime_error {
public:
  Error(ExitCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ExitCode code() const { return code_; }

private:
  ExitCode code_;
};

/// Invalid configuration or parameter set. Carries one message per offending
/// field so the CLI can list them all at once.
class ConfigError : public Error {
public:
  explicit ConfigError(const std::string &what)
      : Error(ExitCode::config, what), fields_{what} {}
  explicit ConfigError(std::vector<std::string> fields)
      : Error(ExitCode::config, join(fields)), fields_(std::move(fields)) {}

  [[nodiscard]] const std::vector<std::string> &fields() const {
    return fields_;
  }

private:
  static std::string join(const std::vector<std::string> &fields) {
    std::string out;
    for (const auto &f : fields) {
      if (!out.empty()) {
        out += "; ";
      }
      out += f;
    }
    return out;
  }

  std::vector<std::string> fields_;
};

/// Malformed or inconsistent input data (files, shapes, indices).
class DataError : public Error {
public:
  explicit DataError(const std::string &what) : Error(ExitCode::data, what) {}
};

/// Geometry or arithmetic that has no valid solution.
class NumericalError : public Error {
public:
  explicit NumericalError(const std::string &what)
      : Error(ExitCode::numerical, what) {}
};

class TotalInternalReflection : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class UnreachableTarget : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace umbir
