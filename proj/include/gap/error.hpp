#pragma once

#include <stdexcept>
#include <string>

namespace gap {

// Root of every error the engine raises. Callers that only need to report
// failures catch this; tests assert on the concrete subclasses.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An artifact could not be parsed (bad header, bad field type, short payload).
class FormatError : public Error {
 public:
  using Error::Error;
};

// An artifact parsed but breaks a schema invariant (duplicate id, out-of-range score).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A function was called outside its documented preconditions.
class ContractError : public Error {
 public:
  using Error::Error;
};

// The data admits no defined answer (zero-norm row, zero variance).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gap
