#ifndef HANDMOTION_ERRORS_HPP_
#define HANDMOTION_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace handmotion {

// Root of every error thrown by the library. The CLI maps the three
// families below to process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or inconsistent input data (files, joint layouts, datasets).
class DataError : public Error {
 public:
  using Error::Error;
};

// Non-finite values, degenerate geometry at numerical level, NaN losses.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// API misuse: wrong shapes, calling things out of order.
class UsageError : public Error {
 public:
  using Error::Error;
};

class LayoutMismatchError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateSkeletonError : public DataError {
 public:
  using DataError::DataError;
};

class TooShortError : public DataError {
 public:
  using DataError::DataError;
};

class ParseError : public DataError {
 public:
  using DataError::DataError;
};

class DatasetError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionError : public UsageError {
 public:
  using UsageError::UsageError;
};

class StateError : public UsageError {
 public:
  using UsageError::UsageError;
};

class InvalidRotationError : public UsageError {
 public:
  using UsageError::UsageError;
};

class OverLengthError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Formats "what (a x b x c)" style messages for shape errors.
std::string shape_message(const std::string& what, std::size_t expected,
                          std::size_t actual);

}  // namespace handmotion

#endif  // HANDMOTION_ERRORS_HPP_
