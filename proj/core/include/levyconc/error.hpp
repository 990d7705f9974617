#pragma once

#include <stdexcept>
#include <string>

namespace levyconc {

enum class ErrorKind {
  kDomain,       // argument outside the mathematical domain (t >= M, R = inf, ...)
  kRange,        // requested value beyond the validity range of a bound
  kConfig,       // malformed or inconsistent configuration
  kNumeric,      // quadrature / inversion failed to reach its tolerance
  kUnsupported,  // well-posed input the library refuses to approximate
};

const char* to_string(ErrorKind kind);

/// Base of every exception thrown by the library. The CLI maps all of them to
/// exit code 2.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::kDomain, what) {}
};

class RangeError : public Error {
 public:
  RangeError(const std::string& what, double validity_sup)
      : Error(ErrorKind::kRange, what), validity_sup_(validity_sup) {}
  double validity_sup() const noexcept { return validity_sup_; }

 private:
  double validity_sup_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::kConfig, what) {}
};

class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved_tolerance)
      : Error(ErrorKind::kNumeric, what),
        achieved_tolerance_(achieved_tolerance) {}
  double achieved_tolerance() const noexcept { return achieved_tolerance_; }

 private:
  double achieved_tolerance_;
};

class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what)
      : Error(ErrorKind::kUnsupported, what) {}
};

}  // namespace levyconc
