#pragma once

#include <stdexcept>
#include <string>

namespace facetflow {

// Thrown when an iterative solver fails to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

// Thrown when a canonical-restriction precondition fails; carries the
// offending residual so callers can report it.
class AssumptionError : public std::runtime_error {
 public:
  AssumptionError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace facetflow
