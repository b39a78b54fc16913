#pragma once

#include <stdexcept>
#include <string>

namespace laxtower {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// λ-support of a result left the context's degree window.
class DegreeOverflow : public Error {
 public:
  using Error::Error;
};

/// Fourier support of a coefficient exceeded the mode cap.
class ModeOverflow : public Error {
 public:
  using Error::Error;
};

class NotInvertible : public Error {
 public:
  using Error::Error;
};

/// A flow or Hamiltonian field left the submanifold it should be tangent to.
class TangencyViolation : public Error {
 public:
  using Error::Error;
};

/// Time integration detected spectral blow-up (shock formation).
class BlowUp : public Error {
 public:
  using Error::Error;
};

class NonzeroMeanInNonlocalTail : public Error {
 public:
  using Error::Error;
};

class UnknownOperator : public Error {
 public:
  using Error::Error;
};

/// Dirac reduction right-hand side is not in the range of the constraint block.
class IllPosedReduction : public Error {
 public:
  using Error::Error;
};

/// Input to a formal inverse has mean components the inverse cannot absorb.
class SectorViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration (CLI or programmatic).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace laxtower
