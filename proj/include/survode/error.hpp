#pragma once

#include <stdexcept>
#include <string>

namespace survode {

/// Base for all library errors. The message is prefixed with the module that
/// raised it, e.g. "events: subject 17: transition 0->3 not in schema".
class Error : public std::runtime_error {
 public:
  Error(const std::string& module, const std::string& what)
      : std::runtime_error(module + ": " + what), module_(module) {}

  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error("events", what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what) : Error("hazard", what) {}
};

class SolveError : public Error {
 public:
  explicit SolveError(const std::string& what) : Error("ode", what) {}
};

class TestError : public Error {
 public:
  explicit TestError(const std::string& what) : Error("testing", what) {}
};

class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what) : Error("simulation", what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error("io", what) {}
};

/// Invalid configuration or command-line usage (exit status 1).
class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

}  // namespace survode
