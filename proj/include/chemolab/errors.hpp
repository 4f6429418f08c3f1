#pragma once

#include <stdexcept>
#include <string>

namespace chemolab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A Custom model produced a nonpositive phi or a negative psi.
class ModelViolation : public Error {
 public:
  using Error::Error;
};

// Quadrature, root finding, linear solves or fits that did not converge.
class NumericsError : public Error {
 public:
  using Error::Error;
};

// An explicit u-update produced a negative density; the caller halves dt.
class StepRejected : public Error {
 public:
  using Error::Error;
};

class EnergyTargetNotReached : public Error {
 public:
  using Error::Error;
};

class NoSolutionFound : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace chemolab
