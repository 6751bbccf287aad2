#pragma once

#include <stdexcept>
#include <string>

namespace stqos {

// Base class for all library failures so callers can catch one type.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

// A series or iteration hit its term cap before reaching the requested
// tolerance. Carries the partial value and an estimate of the missing tail.
class TruncationError : public Error {
public:
  TruncationError(const std::string& what, double partial, double tail_estimate)
      : Error(what), partial_value(partial), tail_bound(tail_estimate) {}
  double partial_value;
  double tail_bound;
};

// Adaptive quadrature could not reach the requested tolerance.
class ConvergenceError : public Error {
public:
  explicit ConvergenceError(const std::string& what) : Error(what) {}
};

// A queueing bound was requested outside its stability region. Carries the
// (negative) margin so callers can report how far off the request was.
class StabilityError : public Error {
public:
  StabilityError(const std::string& what, double margin)
      : Error(what), stability_margin(margin) {}
  double stability_margin;
};

// An argument fell outside the range a transformation can reach.
class UnsupportedArgumentError : public Error {
public:
  explicit UnsupportedArgumentError(const std::string& what) : Error(what) {}
};

}  // namespace stqos
