#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mixfem {

/// Newton ran out of iterations; carries the residual-norm trace.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, std::vector<double> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<double>& trace() const { return trace_; }

 private:
  std::vector<double> trace_;
};

class LinearSolveFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time step of the march failed; step() is the 1-based step index.
class MarchFailure : public NonConvergence {
 public:
  MarchFailure(const std::string& what, int step, std::vector<double> trace)
      : NonConvergence(what, std::move(trace)), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace mixfem
