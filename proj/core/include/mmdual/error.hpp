#pragma once

#include <stdexcept>
#include <string>

namespace mmdual {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A node, slot or agent index was outside its valid range.
class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (dimensions, bounds, file contents).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

}  // namespace mmdual
