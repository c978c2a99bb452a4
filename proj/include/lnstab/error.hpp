#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lnstab {

// Base for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad files, bad parameters, invalid systems.
class InputError : public Error {
 public:
  using Error::Error;
};

// Syntax error in an expression, with the byte offset of the offending token.
class ParseError : public InputError {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : InputError(what + " at offset " + std::to_string(offset)), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Expression evaluated outside its domain (ln of non-positive, sqrt of negative, ...).
class DomainError : public InputError {
 public:
  DomainError(const std::string& node, double t, const std::string& what)
      : InputError(what + " in '" + node + "' at t = " + std::to_string(t)), node_(node), t_(t) {}

  const std::string& node() const noexcept { return node_; }
  double t() const noexcept { return t_; }

 private:
  std::string node_;
  double t_;
};

// Numerical procedure failed: non-convergence, exhausted budget, blow-up.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace lnstab
