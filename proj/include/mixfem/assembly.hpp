#pragma once

// Residual and Jacobian of the backward-Euler mixed system in (m_h, rho_bar_h).
// Unknowns are stacked as x = [m (2 * nodes, interleaved); rho_bar (nodes)].

#include "mixfem/constitutive.hpp"
#include "mixfem/mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <optional>

namespace mixfem {

using SpaceTimeScalar = std::function<double(const Eigen::Vector2d&, double)>;
using SpaceTimeVector = std::function<Eigen::Vector2d(const Eigen::Vector2d&, double)>;

/// Analytic (rho, m) pair of a manufactured problem.
struct ExactSolution {
  SpaceTimeScalar rho;
  SpaceTimeVector m;
};

struct ProblemData {
  ScalarField phi = [](const Eigen::Vector2d&) { return 1.0; };
  double phi_lower{1.0};
  double phi_upper{1.0};
  SpaceTimeScalar f = [](const Eigen::Vector2d&, double) { return 0.0; };
  SpaceTimeScalar Psi = [](const Eigen::Vector2d&, double) { return 0.0; };
  SpaceTimeScalar Psi_t = [](const Eigen::Vector2d&, double) { return 0.0; };
  SpaceTimeVector grad_Psi = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); };
  ScalarField rho0 = [](const Eigen::Vector2d&) { return 0.0; };
  PowerSpec<double> powers{0.5, {1.0}};
  CoefficientVector<double> coefficients = CoefficientVector<double>::from_values({1.0, 1.0, 1.0});
  double eps_reg{1e-10};
  double T{1.0};
  std::optional<ExactSolution> exact;

  GeneralizedPolynomial<double> constitutive_at(double t) const {
    return GeneralizedPolynomial<double>(powers, coefficients.at(t), eps_reg);
  }
};

struct SystemState {
  Eigen::VectorXd rho_bar;
  Eigen::VectorXd m;
  double t{0.0};
};

struct AssemblyOptions {
  /// 2, 3 (= 4), 4 or 5.
  int quadrature_order{4};
  /// Replace boundary density rows by rho_bar = 0 instead of relying on the
  /// weak form alone.
  bool pin_boundary{false};
};

/// Mesh, spaces and quadrature shared by every assembly call of a march.
class Discretization {
 public:
  explicit Discretization(const StructuredTriMesh& mesh, AssemblyOptions options = {});

  const StructuredTriMesh& mesh() const { return *mesh_; }
  const ScalarP1Space& scalar_space() const { return scalar_; }
  const VectorP1Space& vector_space() const { return vector_; }
  const QuadratureRule& rule() const { return rule_; }
  const AssemblyOptions& options() const { return options_; }

  int momentum_size() const { return vector_.size(); }
  int density_size() const { return scalar_.size(); }
  int size() const { return momentum_size() + density_size(); }

  Eigen::VectorXd pack(const SystemState& s) const;
  SystemState unpack(const Eigen::VectorXd& x, double t) const;
  SystemState zero_state(double t = 0.0) const;

  /// Element geometry cached at construction.
  const ElementGeometry& geometry(int tri) const { return geometry_[static_cast<std::size_t>(tri)]; }

 private:
  const StructuredTriMesh* mesh_;
  AssemblyOptions options_;
  ScalarP1Space scalar_;
  VectorP1Space vector_;
  QuadratureRule rule_;
  std::vector<ElementGeometry> geometry_;
};

/// Momentum rows: (F(|m|) m, v) - (rho_bar, div v) + (grad Psi(t_n), v).
/// Density rows: (phi (rho_bar - rho_bar_prev)/dt, q) + (div m, q) - (f(t_n), q) + (phi Psi_t(t_n), q).
Eigen::VectorXd residual(const Discretization& disc, const SystemState& state_n, const SystemState& state_prev,
                         double dt, const ProblemData& data);

/// Exact derivative of residual(): [[A(m), -B^T], [B, M_phi / dt]].
Eigen::SparseMatrix<double> jacobian(const Discretization& disc, const SystemState& state_n, double dt,
                                     const ProblemData& data);

/// Momentum rows alone with rho_bar frozen, and their derivative A(m).
Eigen::VectorXd momentum_residual(const Discretization& disc, const SystemState& state, const ProblemData& data);
Eigen::SparseMatrix<double> momentum_jacobian(const Discretization& disc, const SystemState& state,
                                              const ProblemData& data);

struct InitialStateOptions {
  double tol{1e-10};
  int max_iter{100};
};

/// rho_bar_0 = L2 projection of rho0 - Psi(., 0); m_0 from Newton on the
/// momentum rows starting at m = 0. Throws NonConvergence with the trace.
SystemState initial_state(const Discretization& disc, const ProblemData& data, InitialStateOptions opt = {});

}  // namespace mixfem
