#pragma once

#include <stdexcept>
#include <string>

namespace pinchflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid user-supplied parameter (non-positive curvature bound, b < a, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a pointwise evaluator.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A tabulated surface profile failed one of its post-construction invariants.
class ConstructionError : public Error {
 public:
  ConstructionError(std::string invariant, double at_radius, const std::string& detail)
      : Error("surface invariant '" + invariant + "' violated at r=" + std::to_string(at_radius) +
              ": " + detail),
        invariant_(std::move(invariant)),
        radius_(at_radius) {}

  const std::string& invariant() const noexcept { return invariant_; }
  double radius() const noexcept { return radius_; }

 private:
  std::string invariant_;
  double radius_;
};

/// A geodesic left the tabulated annulus.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double exit_arclength)
      : Error(what), exit_arclength_(exit_arclength) {}

  double exit_arclength() const noexcept { return exit_arclength_; }

 private:
  double exit_arclength_;
};

/// Degenerate discretisation (vanishing speed, coincident samples, failed interpolation).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition (point outside curve, self-intersecting curve, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An experiment produced too little usable data to draw a conclusion.
class InconclusiveError : public Error {
 public:
  using Error::Error;
};

/// Numerical routine failed in a way that valid inputs should not allow.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pinchflow
