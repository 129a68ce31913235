#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bko {

// Base of every error raised by the library. The CLI maps the two
// sub-hierarchies onto exit codes: ConfigError -> 1, NumericalError -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Evaluation of a rational function at its pole x = -1.
class PoleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A recurrence step produced a divisor other than c*(1+x)^j.
class DivisionNotExact : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Ratio test hit a zero (or non-finite) value.
class OrderUndefined : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// The weight series did not certify its tail within max_terms.
class TruncationFailure : public NumericalError {
 public:
  TruncationFailure(const std::string& what, std::size_t terms, double tail)
      : NumericalError(what), terms_(terms), tail_(tail) {}
  std::size_t terms() const noexcept { return terms_; }
  double tail_bound() const noexcept { return tail_; }

 private:
  std::size_t terms_;
  double tail_;
};

class StepUnderflow : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class UnknownMonotonicity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MissingOneSidedData : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonPositiveError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// u_{n,2}(x) <= lambda x (1+x)/(n+1) does not hold yet at this n.
class BelowValidityThreshold : public NumericalError {
 public:
  BelowValidityThreshold(const std::string& what, long min_n)
      : NumericalError(what), min_n_(min_n) {}
  long min_valid_n() const noexcept { return min_n_; }

 private:
  long min_n_;
};

}  // namespace bko
