#pragma once

#include <stdexcept>
#include <string>

namespace sda {

/// Failure category. Maps one-to-one onto the command-line exit codes.
enum class ErrorKind {
  Input = 1,         // malformed or missing input
  Precondition = 2,  // caller violated an operation's precondition
  Invariant = 3,     // internal invariant failed; indicates a bug
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(ErrorKind::Precondition, what) {}
};

class InvariantError : public Error {
 public:
  explicit InvariantError(const std::string& what)
      : Error(ErrorKind::Invariant, what) {}
};

}  // namespace sda
