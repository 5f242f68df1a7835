#pragma once

#include <stdexcept>
#include <string>

namespace procam {

/// Base of every error thrown by the pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter is outside its documented range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must agree in size (or frame count) do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// A file or serialized payload could not be parsed.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Rays or planes are too close to parallel to intersect reliably.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

}  // namespace procam
