#pragma once

#include <stdexcept>
#include <string>

namespace dmod {

// Base for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by zero scalar") {}
};

// A parameter jet was differentiated past its declared truncation order.
class TruncationExceeded : public Error {
 public:
  using Error::Error;
};

// Evaluation hit a vanishing denominator; the caller should pick another point.
class PoleError : public Error {
 public:
  using Error::Error;
};

// A completion or search ran past its configured order cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace dmod
