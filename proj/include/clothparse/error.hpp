#pragma once

#include <stdexcept>
#include <string>

namespace clothparse {

// Base exception for every failure raised by the library. Callers that only
// need "did it work" can catch this; the subclasses below carry the category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace clothparse
