#pragma once

#include <stdexcept>
#include <string>

namespace prodspace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller broke an operation's precondition (bad threshold, misaligned inputs, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Input data is unusable as a whole (missing column, all-zero matrix, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A requested slice (year, country) has no data.
class EmptyResult : public DataError {
 public:
  using DataError::DataError;
};

/// A lookup by code failed.
class NotFound : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed, or a file failed its checksum.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace prodspace
