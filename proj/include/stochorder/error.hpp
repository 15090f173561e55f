#pragma once

#include <stdexcept>
#include <string>

namespace stochorder {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Extended-real sum of +inf and -inf.
class UndefinedSum : public Error {
 public:
  UndefinedSum() : Error("undefined extended-real sum: inf + (-inf)") {}
};

// Quadrature refinement neither stabilized nor certified divergence.
class NonConvergent : public Error {
 public:
  using Error::Error;
};

class CtNotExists : public Error {
 public:
  using Error::Error;
};

class GridTooLarge : public Error {
 public:
  using Error::Error;
};

class LpFailure : public Error {
 public:
  using Error::Error;
};

class UnknownScenario : public Error {
 public:
  explicit UnknownScenario(const std::string& name)
      : Error("unknown scenario: " + name) {}
};

}  // namespace stochorder
