#pragma once

#include <stdexcept>
#include <string>

namespace regenbound {

// Base for every error raised by the library. The CLI maps all of these to
// exit status 2 (input error).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input: a spec that violates its type invariants, an argument
// outside its precondition, an unknown config field.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// The law is well-formed but fails the regularity the coupling needs: no
// absolutely continuous component, divergent mean, degenerate splitting.
class ConditionViolated : public Error {
 public:
  using Error::Error;
};

// A query outside the domain of an otherwise valid object, e.g. a quantile at
// y >= 1 or an overshoot at an age beyond the support.
class DomainError : public Error {
 public:
  using Error::Error;
};

// The requested bound does not exist for these inputs (rate not admissible,
// exponential mode unavailable for heavy tails).
class NotAdmissible : public Error {
 public:
  using Error::Error;
};

}  // namespace regenbound
