#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace myerson_lab {

/// Argument outside the mathematical domain of an operation (e.g. q <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Virtual value undefined because the density vanishes at the point.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Structurally invalid input: unsorted points, negative bids, bad files.
class MalformedInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameter combination rejected by an operation's preconditions.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The virtual value is negative everywhere, so no reserve price exists.
class NoReserveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejection sampling ran out of raw draws before collecting enough accepted
/// trials.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, std::size_t accepted, std::size_t draws)
      : std::runtime_error(what), accepted_(accepted), draws_(draws) {}

  std::size_t accepted() const { return accepted_; }
  std::size_t draws() const { return draws_; }

 private:
  std::size_t accepted_;
  std::size_t draws_;
};

}  // namespace myerson_lab
