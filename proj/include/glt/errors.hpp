#pragma once

#include <stdexcept>
#include <string>

namespace glt {

// Exit codes used by the CLI; every library error maps onto one of them.
enum class ExitCode : int { ok = 0, config = 2, data = 3, numeric = 4 };

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::config, what) {}
};

// Invalid parameter region for a closed-form function or a distribution.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ExitCode::config, what) {}
};

class InstanceTooLarge : public Error {
 public:
  explicit InstanceTooLarge(const std::string& what) : Error(ExitCode::config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::data, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ExitCode::numeric, what) {}
};

// No variance-identified draws to summarize.
class EmptySample : public Error {
 public:
  explicit EmptySample(const std::string& what) : Error(ExitCode::numeric, what) {}
};

}  // namespace glt
