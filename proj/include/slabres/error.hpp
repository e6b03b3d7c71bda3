#pragma once

#include <stdexcept>
#include <string>

namespace slabres {

// Failure categories. The CLI maps each category onto a process exit code.
enum class ErrorKind {
  usage = 1,
  config = 2,
  numerical = 3,
  outside_diamond = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::numerical, what) {}
};

class OutsideDiamondError : public Error {
 public:
  explicit OutsideDiamondError(const std::string& what)
      : Error(ErrorKind::outside_diamond, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

}  // namespace slabres
