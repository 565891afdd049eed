#include "mixfem/solver.hpp"

#include "mixfem/errors.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace mixfem {

namespace {

/// LDL^T without pivoting; succeeds for symmetric quasi-definite matrices.
bool try_ldlt(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b, double abs_tol, Eigen::VectorXd& x) {
  const Eigen::SparseMatrix<double> At = A.transpose();
  if ((A - At).norm() > 1e-14 * A.norm()) return false;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) return false;
  x = ldlt.solve(b);
  return ldlt.info() == Eigen::Success && x.allFinite() && (A * x - b).norm() <= abs_tol;
}

}  // namespace

Eigen::VectorXd linear_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b,
                             const LinearSolveContract& contract) {
  const double bnorm = b.norm();
  if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd x;
  if (contract.mode == LinearSolverMode::Direct) {
    if (!try_ldlt(A, b, contract.rel_tol * bnorm, x)) {
      Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
      lu.compute(A);
      if (lu.info() != Eigen::Success) throw LinearSolveFailure("linear_solve: sparse LU factorization failed");
      x = lu.solve(b);
      if (lu.info() != Eigen::Success) throw LinearSolveFailure("linear_solve: sparse LU solve failed");
    }
  } else {
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.preconditioner().setDroptol(1e-6);
    it.preconditioner().setFillfactor(20);
    it.setTolerance(contract.rel_tol * 0.1);
    it.setMaxIterations(contract.max_iter);
    it.compute(A);
    if (it.info() != Eigen::Success) throw LinearSolveFailure("linear_solve: ILUT preconditioner failed");
    x = it.solve(b);
    if (it.info() != Eigen::Success) {
      std::ostringstream msg;
      msg << "linear_solve: BiCGSTAB stopped after " << it.iterations() << " iterations, error " << it.error();
      throw LinearSolveFailure(msg.str());
    }
  }
  if (contract.verify) {
    const double rel = (A * x - b).norm() / bnorm;
    if (!(rel <= contract.rel_tol)) {
      std::ostringstream msg;
      msg << "linear_solve: relative residual " << rel << " exceeds " << contract.rel_tol;
      throw LinearSolveFailure(msg.str());
    }
  }
  return x;
}

std::pair<SystemState, NewtonStats> newton_solve(const Discretization& disc, const SystemState& state_prev, double t_n,
                                                 double dt, const ProblemData& data, const NewtonConfig& cfg,
                                                 const LinearSolveContract& linear) {
  SystemState state = state_prev;
  state.t = t_n;
  Eigen::VectorXd r = residual(disc, state, state_prev, dt, data);
  Eigen::VectorXd sign = Eigen::VectorXd::Ones(disc.size());
  sign.tail(disc.density_size()).setConstant(-1.0);
  NewtonStats stats;
  stats.initial_residual = r.norm();
  stats.trace.push_back(stats.initial_residual);
  double rnorm = stats.initial_residual;
  while (rnorm > cfg.tol) {
    if (stats.iterations >= cfg.max_iter) {
      std::ostringstream msg;
      msg << "newton_solve: no convergence at t=" << t_n << " after " << cfg.max_iter << " iterations (residual "
          << rnorm << ")";
      throw NonConvergence(msg.str(), stats.trace);
    }
    // Negated density rows make the unpinned Jacobian symmetric quasi-definite.
    const Eigen::SparseMatrix<double> J = sign.asDiagonal() * jacobian(disc, state, dt, data);
    const Eigen::VectorXd dx = linear_solve(J, -(sign.asDiagonal() * r), linear);
    Eigen::VectorXd x = disc.pack(state);
    SystemState trial = disc.unpack(x + dx, t_n);
    Eigen::VectorXd r_trial = residual(disc, trial, state_prev, dt, data);
    if (cfg.damping) {
      double step = 1.0;
      for (int k = 0; k < cfg.max_halvings && r_trial.norm() > rnorm; ++k) {
        step *= 0.5;
        trial = disc.unpack(x + step * dx, t_n);
        r_trial = residual(disc, trial, state_prev, dt, data);
      }
    }
    state = std::move(trial);
    r = std::move(r_trial);
    rnorm = r.norm();
    ++stats.iterations;
    stats.trace.push_back(rnorm);
  }
  stats.final_residual = rnorm;
  return {std::move(state), std::move(stats)};
}

MarchConfig MarchConfig::for_mesh(const StructuredTriMesh& mesh, double ratio, double T) {
  MarchConfig cfg;
  cfg.dt = ratio * mesh.h;
  cfg.T = T;
  return cfg;
}

int MarchConfig::step_count() const {
  if (!(dt > 0.0)) throw std::invalid_argument("MarchConfig: dt must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("MarchConfig: T must be positive");
  const int M = static_cast<int>(std::lround(T / dt));
  if (M < 1 || std::abs(M * dt - T) > 1e-12) {
    throw std::invalid_argument("MarchConfig: T must be an integer multiple of dt");
  }
  return M;
}

int MarchResult::newton_total() const {
  int total = 0;
  for (const auto& s : steps) total += s.newton_iters;
  return total;
}

MarchResult march(const ProblemData& data, const Discretization& disc, const MarchConfig& cfg,
                  const NewtonConfig& newton, const LinearSolveContract& linear) {
  const int M = cfg.step_count();
  std::ostream& log = cfg.log ? *cfg.log : std::cout;
  MarchResult out;
  out.initial = initial_state(disc, data);
  out.rho0_norm2 = std::pow(norm(disc.scalar_space(), out.initial.rho_bar, 2.0, {}, disc.rule()), 2.0);
  out.steps.reserve(static_cast<std::size_t>(M));

  SystemState prev = out.initial;
  std::vector<EnergyTerms> terms;
  for (int n = 1; n <= M; ++n) {
    const double t_n = n * cfg.dt;
    std::pair<SystemState, NewtonStats> solved;
    try {
      solved = newton_solve(disc, prev, t_n, cfg.dt, data, newton, linear);
    } catch (const NonConvergence& e) {
      throw MarchFailure(std::string("march: step ") + std::to_string(n) + ": " + e.what(), n, e.trace());
    } catch (const LinearSolveFailure& e) {
      throw MarchFailure(std::string("march: step ") + std::to_string(n) + ": " + e.what(), n, {});
    }
    auto& [state, stats] = solved;
    StepDiagnostics d;
    d.n = n;
    d.t = t_n;
    d.newton_iters = stats.iterations;
    d.residual = stats.final_residual;
    if (cfg.record_energies) {
      d.terms = energy_terms(disc, state, data);
      terms.push_back(d.terms);
      d.energy = stability_energy(terms, cfg.dt, out.rho0_norm2).back();
    }
    if (cfg.verbose) {
      char line[160];
      std::snprintf(line, sizeof line, "%d %.6f %d %.6e %.6e\n", n, t_n, d.newton_iters, d.residual, d.energy.left());
      log << line;
    }
    if (cfg.on_step) cfg.on_step(state);
    out.steps.push_back(d);
    out.newton_traces.push_back(std::move(stats.trace));
    prev = std::move(state);
  }
  out.final_state = std::move(prev);
  return out;
}

}  // namespace mixfem
