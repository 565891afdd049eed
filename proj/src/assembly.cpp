#include "mixfem/assembly.hpp"

#include "mixfem/errors.hpp"

#include <Eigen/SparseCholesky>

#include <sstream>
#include <stdexcept>

namespace mixfem {

Discretization::Discretization(const StructuredTriMesh& mesh, AssemblyOptions options)
    : mesh_(&mesh),
      options_(options),
      scalar_(mesh),
      vector_(mesh),
      rule_(triangle_rule(options.quadrature_order)) {
  if (options.quadrature_order < 2) {
    throw std::invalid_argument("Discretization: the one-point rule makes the P1 mass matrix singular; use order >= 2");
  }
  geometry_.reserve(static_cast<std::size_t>(mesh.triangle_count()));
  for (int e = 0; e < mesh.triangle_count(); ++e) geometry_.push_back(element_geometry(mesh, e));
}

Eigen::VectorXd Discretization::pack(const SystemState& s) const {
  Eigen::VectorXd x(size());
  x.head(momentum_size()) = s.m;
  x.tail(density_size()) = s.rho_bar;
  return x;
}

SystemState Discretization::unpack(const Eigen::VectorXd& x, double t) const {
  return {x.tail(density_size()), x.head(momentum_size()), t};
}

SystemState Discretization::zero_state(double t) const {
  return {Eigen::VectorXd::Zero(density_size()), Eigen::VectorXd::Zero(momentum_size()), t};
}

namespace {

struct LocalValues {
  std::array<int, 3> nodes;
  Eigen::Matrix<double, 2, 3> m;  // nodal momentum, one column per vertex
  Eigen::Vector3d rho;
};

LocalValues gather(const StructuredTriMesh& mesh, int e, const SystemState& s) {
  LocalValues lv;
  lv.nodes = mesh.triangles[static_cast<std::size_t>(e)];
  for (int a = 0; a < 3; ++a) {
    const int n = lv.nodes[static_cast<std::size_t>(a)];
    lv.m.col(a) = s.m.segment<2>(VectorP1Space::index(n, 0));
    lv.rho(a) = s.rho_bar(n);
  }
  return lv;
}

Eigen::Vector3d basis_at(const Eigen::Vector2d& ref) { return {1.0 - ref.x() - ref.y(), ref.x(), ref.y()}; }

bool pinned(const Discretization& disc, int node) {
  return disc.options().pin_boundary && disc.mesh().on_boundary[static_cast<std::size_t>(node)];
}

void add_momentum_rows(const Discretization& disc, int e, const LocalValues& lv, const ProblemData& data,
                       const GeneralizedPolynomial<double>& F, double t, Eigen::VectorXd& r) {
  const auto& geo = disc.geometry(e);
  const auto& rule = disc.rule();
  Eigen::Matrix<double, 2, 3> local = Eigen::Matrix<double, 2, 3>::Zero();
  for (int q = 0; q < rule.size(); ++q) {
    const auto& ref = rule.points[static_cast<std::size_t>(q)];
    const Eigen::Vector3d lam = basis_at(ref);
    const Eigen::Vector2d x = geo.map(ref);
    const double W = 2.0 * geo.area * rule.weights[static_cast<std::size_t>(q)];
    const Eigen::Vector2d mq = lv.m * lam;
    const double rq = lv.rho.dot(lam);
    const Eigen::Vector2d load = flux(F, mq) + data.grad_Psi(x, t);
    // (F m + grad Psi) . (lambda_a e_c) - rho * d_c lambda_a
    local.noalias() += W * (load * lam.transpose() - rq * geo.grad.transpose());
  }
  for (int a = 0; a < 3; ++a) r.segment<2>(VectorP1Space::index(lv.nodes[static_cast<std::size_t>(a)], 0)) += local.col(a);
}

void add_momentum_jacobian(const Discretization& disc, int e, const LocalValues& lv,
                           const GeneralizedPolynomial<double>& F, std::vector<Eigen::Triplet<double>>& trip) {
  const auto& geo = disc.geometry(e);
  const auto& rule = disc.rule();
  Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
  for (int q = 0; q < rule.size(); ++q) {
    const auto& ref = rule.points[static_cast<std::size_t>(q)];
    const Eigen::Vector3d lam = basis_at(ref);
    const double W = 2.0 * geo.area * rule.weights[static_cast<std::size_t>(q)];
    const Eigen::Matrix2d J = flux_jacobian(F, lv.m * lam);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) local.block<2, 2>(2 * a, 2 * b).noalias() += (W * lam(a) * lam(b)) * J;
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          trip.emplace_back(VectorP1Space::index(lv.nodes[static_cast<std::size_t>(a)], c),
                            VectorP1Space::index(lv.nodes[static_cast<std::size_t>(b)], d), local(2 * a + c, 2 * b + d));
}

}  // namespace

Eigen::VectorXd residual(const Discretization& disc, const SystemState& state_n, const SystemState& state_prev,
                         double dt, const ProblemData& data) {
  const auto& mesh = disc.mesh();
  const auto& rule = disc.rule();
  const double t = state_n.t;
  const auto F = data.constitutive_at(t);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(disc.size());
  Eigen::VectorXd density = Eigen::VectorXd::Zero(disc.density_size());
  for (int e = 0; e < mesh.triangle_count(); ++e) {
    const auto lv = gather(mesh, e, state_n);
    add_momentum_rows(disc, e, lv, data, F, t, r);

    const auto& geo = disc.geometry(e);
    const auto& nodes = lv.nodes;
    const Eigen::Vector3d rho_prev(state_prev.rho_bar(nodes[0]), state_prev.rho_bar(nodes[1]),
                                   state_prev.rho_bar(nodes[2]));
    double div = 0.0;
    for (int a = 0; a < 3; ++a) div += geo.grad.row(a).dot(lv.m.col(a));
    Eigen::Vector3d local = Eigen::Vector3d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const auto& ref = rule.points[static_cast<std::size_t>(q)];
      const Eigen::Vector3d lam = basis_at(ref);
      const Eigen::Vector2d x = geo.map(ref);
      const double W = 2.0 * geo.area * rule.weights[static_cast<std::size_t>(q)];
      const double phi = data.phi(x);
      const double drho = (lv.rho - rho_prev).dot(lam) / dt;
      local += W * (phi * drho + div - data.f(x, t) + phi * data.Psi_t(x, t)) * lam;
    }
    for (int a = 0; a < 3; ++a) density(nodes[static_cast<std::size_t>(a)]) += local(a);
  }
  for (int i = 0; i < disc.density_size(); ++i) {
    if (pinned(disc, i)) density(i) = state_n.rho_bar(i);
  }
  r.tail(disc.density_size()) = density;
  return r;
}

Eigen::SparseMatrix<double> jacobian(const Discretization& disc, const SystemState& state_n, double dt,
                                     const ProblemData& data) {
  const auto& mesh = disc.mesh();
  const auto& rule = disc.rule();
  const auto F = data.constitutive_at(state_n.t);
  const int off = disc.momentum_size();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(mesh.triangle_count()) * (36 + 2 * 18 + 9));
  for (int e = 0; e < mesh.triangle_count(); ++e) {
    const auto lv = gather(mesh, e, state_n);
    add_momentum_jacobian(disc, e, lv, F, trip);

    const auto& geo = disc.geometry(e);
    Eigen::Matrix3d mass = Eigen::Matrix3d::Zero();
    Eigen::Vector3d integral_lam = Eigen::Vector3d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const auto& ref = rule.points[static_cast<std::size_t>(q)];
      const Eigen::Vector3d lam = basis_at(ref);
      const double W = 2.0 * geo.area * rule.weights[static_cast<std::size_t>(q)];
      mass.noalias() += (W * data.phi(geo.map(ref)) / dt) * lam * lam.transpose();
      integral_lam += W * lam;
    }
    for (int a = 0; a < 3; ++a) {
      const int qa = lv.nodes[static_cast<std::size_t>(a)];
      const bool pin = pinned(disc, qa);
      for (int b = 0; b < 3; ++b) {
        const int nb = lv.nodes[static_cast<std::size_t>(b)];
        for (int c = 0; c < 2; ++c) {
          // B(q_a, v_{b,c}) = (d_c lambda_b, lambda_a); the momentum row carries -B^T.
          const double coupling = geo.grad(b, c) * integral_lam(a);
          if (!pin) trip.emplace_back(off + qa, VectorP1Space::index(nb, c), coupling);
          trip.emplace_back(VectorP1Space::index(nb, c), off + qa, -coupling);
        }
        if (!pin) trip.emplace_back(off + qa, off + nb, mass(a, b));
      }
    }
  }
  if (disc.options().pin_boundary) {
    for (int i : mesh.boundary_nodes) trip.emplace_back(off + i, off + i, 1.0);
  }
  Eigen::SparseMatrix<double> J(disc.size(), disc.size());
  J.setFromTriplets(trip.begin(), trip.end());
  return J;
}

Eigen::VectorXd momentum_residual(const Discretization& disc, const SystemState& state, const ProblemData& data) {
  const auto F = data.constitutive_at(state.t);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(disc.size());
  for (int e = 0; e < disc.mesh().triangle_count(); ++e) {
    add_momentum_rows(disc, e, gather(disc.mesh(), e, state), data, F, state.t, r);
  }
  return r.head(disc.momentum_size());
}

Eigen::SparseMatrix<double> momentum_jacobian(const Discretization& disc, const SystemState& state,
                                              const ProblemData& data) {
  const auto F = data.constitutive_at(state.t);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(disc.mesh().triangle_count()) * 36);
  for (int e = 0; e < disc.mesh().triangle_count(); ++e) {
    add_momentum_jacobian(disc, e, gather(disc.mesh(), e, state), F, trip);
  }
  Eigen::SparseMatrix<double> A(disc.momentum_size(), disc.momentum_size());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SystemState initial_state(const Discretization& disc, const ProblemData& data, InitialStateOptions opt) {
  SystemState s = disc.zero_state(0.0);
  s.rho_bar = l2_project(
      disc.scalar_space(), [&](const Eigen::Vector2d& x) { return data.rho0(x) - data.Psi(x, 0.0); }, disc.rule());
  if (disc.options().pin_boundary) {
    for (int i : disc.mesh().boundary_nodes) s.rho_bar(i) = 0.0;
  }

  std::vector<double> trace;
  Eigen::VectorXd r = momentum_residual(disc, s, data);
  trace.push_back(r.norm());
  for (int it = 0; trace.back() > opt.tol; ++it) {
    if (it >= opt.max_iter) {
      std::ostringstream msg;
      msg << "initial_state: momentum Newton did not converge in " << opt.max_iter
          << " iterations (residual " << trace.back() << ")";
      throw NonConvergence(msg.str(), trace);
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(momentum_jacobian(disc, s, data));
    if (ldlt.info() != Eigen::Success) throw LinearSolveFailure("initial_state: momentum block factorization failed");
    s.m -= ldlt.solve(r);
    r = momentum_residual(disc, s, data);
    trace.push_back(r.norm());
  }
  return s;
}

}  // namespace mixfem
