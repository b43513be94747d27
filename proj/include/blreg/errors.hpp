#pragma once

#include <stdexcept>
#include <string>

namespace blreg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different band-limited domains or have incompatible ranks.
class DomainMismatch : public Error {
 public:
  using Error::Error;
};

/// A spectrum whose inverse transform would not be real.
class SymmetryViolation : public Error {
 public:
  using Error::Error;
};

/// Time step too coarse for the transport speed and auto-refinement is off.
class CflViolation : public Error {
 public:
  CflViolation(const std::string& what, double number, int proposed_steps)
      : Error(what), number_(number), proposed_steps_(proposed_steps) {}
  double number() const { return number_; }
  int proposed_steps() const { return proposed_steps_; }

 private:
  double number_;
  int proposed_steps_;
};

/// NaN/Inf appeared in a field that must stay finite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A cached trajectory does not belong to the velocity it is used with.
class StaleCache : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace blreg
