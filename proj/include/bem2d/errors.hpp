#pragma once

#include <stdexcept>
#include <string>

namespace bem2d {

// Caller mistakes: bad parameters, malformed meshes, out-of-range ids.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidGeometry : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Point evaluations requested at a panel end point or off the boundary.
class InvalidEvaluationPoint : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Doerfler marking on an all-zero estimator; callers treat it as convergence.
class EmptyMarking : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// Everything the numerics can legitimately fail at.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonEllipticGeometry : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class NotPositiveDefinite : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class NonConvergence : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

class DataEvaluationError : public NumericalFailure {
 public:
  DataEvaluationError(const std::string& what, long panel)
      : NumericalFailure(what + " (panel " + std::to_string(panel) + ")"), panel_(panel) {}
  long panel() const noexcept { return panel_; }

 private:
  long panel_;
};

class InconsistentExactSolution : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace bem2d
