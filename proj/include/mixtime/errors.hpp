#pragma once

#include <stdexcept>
#include <string>

namespace mixtime {

// Base of everything thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad user input: malformed documents, unknown names, out-of-range sizes.
struct ConfigError : Error {
  using Error::Error;
};

// A numerical routine failed or did not reach its target.
struct NumericalError : Error {
  using Error::Error;
};

// The input was well formed but violates a documented precondition.
struct PreconditionError : Error {
  using Error::Error;
};

struct ParseError : ConfigError {
  using ConfigError::ConfigError;
};

struct SchemaError : ConfigError {
  SchemaError(const std::string& pointer, const std::string& what)
      : ConfigError("schema error at " + pointer + ": " + what), pointer(pointer) {}
  std::string pointer;
};

struct UnknownTerm : ConfigError {
  using ConfigError::ConfigError;
};

struct UnknownOperator : ConfigError {
  using ConfigError::ConfigError;
};

struct SiteOutOfRange : ConfigError {
  using ConfigError::ConfigError;
};

struct DimOverflow : ConfigError {
  using ConfigError::ConfigError;
};

struct SvdFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct EigFailure : NumericalError {
  using NumericalError::NumericalError;
};

struct NotConverged : NumericalError {
  NotConverged(const std::string& what, double final_distance)
      : NumericalError(what), final_distance(final_distance) {}
  double final_distance;
};

struct NonSquareDim : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct DimMismatch : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NotHermitian : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NoDecayingMode : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct DegenerateSteadyManifold : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct ProbeInfeasible : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NonpositiveGap : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NotBoundaryGeometry : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NotBulkGeometry : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NotCommutingKSet : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct NonOrthonormalBasis : PreconditionError {
  using PreconditionError::PreconditionError;
};

struct InsufficientPoints : PreconditionError {
  using PreconditionError::PreconditionError;
};

}  // namespace mixtime
