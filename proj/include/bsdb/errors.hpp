#pragma once

#include <stdexcept>
#include <string>

namespace bsdb {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A value is outside its documented range (bad epsilon, window size, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Operands have incompatible dimensions.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// File or directory level failure.
class IoError : public Error {
public:
  using Error::Error;
};

/// Numerical routine failed (solver did not converge, non-finite result).
class NumericError : public Error {
public:
  using Error::Error;
};

} // namespace bsdb
