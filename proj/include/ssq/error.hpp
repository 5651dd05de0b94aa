#pragma once

#include <stdexcept>
#include <string>

namespace ssq {

// Error categories map one-to-one onto the C API status codes and the CLI exit codes.
enum class ErrorKind {
  argument,   // bad numeric argument or precondition
  config,     // configuration parse/shape errors
  invariant,  // a physics or numerical invariant was violated
  io,         // filesystem problems
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ErrorKind::argument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what) : Error(ErrorKind::invariant, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace ssq
