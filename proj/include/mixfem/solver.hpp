#pragma once

#include "mixfem/analysis.hpp"
#include "mixfem/assembly.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <vector>

namespace mixfem {

struct NewtonConfig {
  double tol{1e-6};
  int max_iter{30};
  /// Halve the step while the residual norm increases.
  bool damping{false};
  int max_halvings{12};
};

/// Direct: sparse LDL^T when A is symmetric and the factorization meets the
/// tolerance, sparse LU otherwise. Iterative: BiCGSTAB with ILUT.
enum class LinearSolverMode { Direct, Iterative };

struct LinearSolveContract {
  LinearSolverMode mode{LinearSolverMode::Direct};
  double rel_tol{1e-10};
  int max_iter{2000};
  /// Check ||A x - b|| / ||b|| <= rel_tol after every solve.
  bool verify{true};
};

/// Solves A x = b under the contract; throws LinearSolveFailure.
Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                             const LinearSolveContract& contract);

struct NewtonStats {
  int iterations{0};
  double initial_residual{0.0};
  double final_residual{0.0};
  std::vector<double> trace;
};

/// Newton for one backward-Euler step, starting from state_prev. Throws
/// NonConvergence (with the residual trace) after max_iter iterations.
std::pair<SystemState, NewtonStats> newton_solve(const Discretization& disc, const SystemState& state_prev, double t_n,
                                                 double dt, const ProblemData& data, const NewtonConfig& cfg = {},
                                                 const LinearSolveContract& linear = {});

struct MarchConfig {
  double dt{0.0};
  double T{1.0};
  bool record_energies{true};
  /// Called with every accepted state t_1 .. t_M.
  std::function<void(const SystemState&)> on_step;
  bool verbose{false};
  /// Diagnostics stream used when verbose; defaults to std::cout.
  std::ostream* log{nullptr};

  /// dt = ratio * h.
  static MarchConfig for_mesh(const StructuredTriMesh& mesh, double ratio = 0.5, double T = 1.0);
  /// M = round(T / dt); throws if M dt differs from T by more than 1e-12.
  int step_count() const;
};

struct StepDiagnostics {
  int n{0};
  double t{0.0};
  int newton_iters{0};
  double residual{0.0};
  EnergyTerms terms;
  StabilityEnergy energy;
};

struct MarchResult {
  SystemState initial;
  SystemState final_state;
  double rho0_norm2{0.0};
  std::vector<StepDiagnostics> steps;
  std::vector<std::vector<double>> newton_traces;

  int newton_total() const;
};

/// Backward-Euler march from initial_state(). Throws MarchFailure carrying
/// the 1-based step index on the first Newton failure.
MarchResult march(const ProblemData& data, const Discretization& disc, const MarchConfig& cfg,
                  const NewtonConfig& newton = {}, const LinearSolveContract& linear = {});

}  // namespace mixfem
