#pragma once

#include <stdexcept>
#include <string>

namespace sheathlab {

/// Base class for all solver/diagnostic failures thrown by this library.
/// Invalid arguments (broken type invariants) throw std::invalid_argument instead.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MarginViolation : Error {
  using Error::Error;
};
struct InvalidMesh : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct OutOfRange : Error {
  using Error::Error;
};
struct BohmViolation : Error {
  using Error::Error;
};
struct InadmissibleBoundaryValue : Error {
  using Error::Error;
};
struct NonPositiveV : Error {
  using Error::Error;
};
struct CoercivityLoss : Error {
  using Error::Error;
};
struct QuadratureTail : Error {
  using Error::Error;
};
struct SupersonicLost : Error {
  using Error::Error;
};
struct NewtonDivergence : Error {
  using Error::Error;
};
struct NonPositiveDensity : Error {
  using Error::Error;
};
struct BohmLost : Error {
  using Error::Error;
};
struct RegimeMismatch : Error {
  using Error::Error;
};
struct NonPositiveSymmetrizer : Error {
  using Error::Error;
};
struct WindowTooNoisy : Error {
  using Error::Error;
};
struct FitFailure : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace sheathlab
