#pragma once

#include <stdexcept>
#include <string>

namespace kobalab {

/// Base class for all kobalab failures.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Precondition violated by a caller (bad scalar ranges, bad counts).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The switch-point equation has no positive root for the given growth value.
class NoRootError : public Error {
 public:
  NoRootError(const std::string& what, int index) : Error(what), index(index) {}
  int index = 0;
};

/// A sequence entry rounded to exact zero; the run needs more precision bits.
class UnderflowError : public Error {
 public:
  UnderflowError(const std::string& what, int index) : Error(what), index(index) {}
  int index = 0;
};

/// Quadrature node count below the certified minimum.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// A finite-difference stencil point left the function's domain.
class StencilError : public Error {
 public:
  using Error::Error;
};

/// A region sweep was left with no sample points after exclusion.
class EmptyRegionError : public Error {
 public:
  using Error::Error;
};

/// Point fails the on-variety tolerance check.
class NotOnVarietyError : public Error {
 public:
  using Error::Error;
};

/// Point is farther than the tube half-width from every sheet.
class OutsideTubeError : public Error {
 public:
  using Error::Error;
};

/// Point is inside the core ball where the sheet projection degenerates.
class InsideCoreError : public Error {
 public:
  using Error::Error;
};

/// The corrector's sampled Levi minimum was not positive.
class NonPositiveCorrectorError : public Error {
 public:
  using Error::Error;
};

/// Disc derivative and requested direction are not parallel.
class NotParallelError : public Error {
 public:
  using Error::Error;
};

/// A Kobayashi bound was requested from a disc whose certificate failed.
class CertRequiredError : public Error {
 public:
  using Error::Error;
};

}  // namespace kobalab
