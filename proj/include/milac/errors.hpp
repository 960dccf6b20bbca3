// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace milac {

// Caller broke a documented precondition (bad dimensions, non-Hermitian
// input, infeasible point, rank-deficient channel, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical routine failed beyond recovery (factorization did not
// converge, singular linear system, ...). Distinct from an unconverged
// solver, which returns its best iterate flagged instead of throwing.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text input (channel files, config files); message carries the
// offending line or key.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace milac
