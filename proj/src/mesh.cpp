#include "mixfem/mesh.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mixfem {

StructuredTriMesh build_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_mesh: need at least one cell per side");
  StructuredTriMesh mesh;
  mesh.n_cells_per_side = n;
  mesh.h = 1.0 / n;
  const int stride = n + 1;
  mesh.nodes.reserve(static_cast<std::size_t>(stride * stride));
  mesh.on_boundary.assign(static_cast<std::size_t>(stride * stride), 0);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.nodes.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
      if (i == 0 || j == 0 || i == n || j == n) {
        mesh.boundary_nodes.push_back(j * stride + i);
        mesh.on_boundary[static_cast<std::size_t>(j * stride + i)] = 1;
      }
    }
  }
  mesh.triangles.reserve(static_cast<std::size_t>(2 * n * n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int v00 = j * stride + i;
      const int v10 = v00 + 1;
      const int v01 = v00 + stride;
      const int v11 = v01 + 1;
      mesh.triangles.push_back({v00, v10, v11});
      mesh.triangles.push_back({v00, v11, v01});
    }
  }
  return mesh;
}

void write_mesh(std::ostream& os, const StructuredTriMesh& mesh) {
  const auto old = os.precision(17);
  for (const auto& x : mesh.nodes) os << x.x() << ' ' << x.y() << '\n';
  for (const auto& t : mesh.triangles) os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  os.precision(old);
}

ElementGeometry element_geometry(const StructuredTriMesh& mesh, int tri) {
  const auto& t = mesh.triangles[static_cast<std::size_t>(tri)];
  ElementGeometry geo;
  for (int a = 0; a < 3; ++a) geo.vertices[static_cast<std::size_t>(a)] = mesh.nodes[static_cast<std::size_t>(t[static_cast<std::size_t>(a)])];
  Eigen::Matrix2d B;
  B.col(0) = geo.vertices[1] - geo.vertices[0];
  B.col(1) = geo.vertices[2] - geo.vertices[0];
  const double det = B.determinant();
  geo.area = 0.5 * det;
  // grad lambda_1, lambda_2 are the rows of B^{-1}; lambda_0 = 1 - lambda_1 - lambda_2.
  const Eigen::Matrix2d Binv = B.inverse();
  geo.grad.row(1) = Binv.row(0);
  geo.grad.row(2) = Binv.row(1);
  geo.grad.row(0) = -(Binv.row(0) + Binv.row(1));
  return geo;
}

Eigen::Vector3d barycentric(const ElementGeometry& geo, const Eigen::Vector2d& x) {
  Eigen::Vector3d lam;
  const Eigen::Vector2d d = x - geo.vertices[0];
  lam(1) = geo.grad.row(1).dot(d);
  lam(2) = geo.grad.row(2).dot(d);
  lam(0) = 1.0 - lam(1) - lam(2);
  return lam;
}

int locate(const StructuredTriMesh& mesh, const Eigen::Vector2d& x) {
  const int n = mesh.n_cells_per_side;
  const int i = std::clamp(static_cast<int>(std::floor(x.x() * n)), 0, n - 1);
  const int j = std::clamp(static_cast<int>(std::floor(x.y() * n)), 0, n - 1);
  const double lx = x.x() * n - i;
  const double ly = x.y() * n - j;
  const int base = 2 * (j * n + i);
  return ly <= lx ? base : base + 1;
}

QuadratureRule triangle_rule(int order) {
  QuadratureRule rule;
  const auto orbit3 = [&rule](double a, double b, double w) {
    rule.points.emplace_back(a, a);
    rule.points.emplace_back(b, a);
    rule.points.emplace_back(a, b);
    rule.weights.insert(rule.weights.end(), 3, 0.5 * w);
  };
  switch (order) {
    case 1:
      rule.order = 1;
      rule.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      rule.weights.push_back(0.5);
      break;
    case 2:
      rule.order = 2;
      orbit3(1.0 / 6.0, 2.0 / 3.0, 1.0 / 3.0);
      break;
    case 3:
    case 4:
      // Dunavant degree-4, six points.
      rule.order = 4;
      orbit3(0.445948490915964886318329, 0.108103018168070227363342, 0.223381589678011465944);
      orbit3(0.091576213509770743459571, 0.816847572980458513080857, 0.109951743655321867389);
      break;
    case 5: {
      rule.order = 5;
      const double r15 = std::sqrt(15.0);
      rule.points.emplace_back(1.0 / 3.0, 1.0 / 3.0);
      rule.weights.push_back(0.5 * 9.0 / 40.0);
      const double a1 = (6.0 - r15) / 21.0;
      orbit3(a1, 1.0 - 2.0 * a1, (155.0 - r15) / 1200.0);
      const double a2 = (6.0 + r15) / 21.0;
      orbit3(a2, 1.0 - 2.0 * a2, (155.0 + r15) / 1200.0);
      break;
    }
    default:
      throw std::invalid_argument("triangle_rule: supported orders are 1, 2, 3, 4, 5");
  }
  return rule;
}

namespace {

Eigen::Vector3d reference_basis(const Eigen::Vector2d& ref) {
  return {1.0 - ref.x() - ref.y(), ref.x(), ref.y()};
}

}  // namespace

Eigen::VectorXd interpolate(const ScalarP1Space& space, const ScalarField& g) {
  const auto& mesh = space.mesh();
  Eigen::VectorXd out(space.size());
  for (int i = 0; i < mesh.node_count(); ++i) out(i) = g(mesh.nodes[static_cast<std::size_t>(i)]);
  return out;
}

Eigen::VectorXd interpolate(const VectorP1Space& space, const VectorField& g) {
  const auto& mesh = space.mesh();
  Eigen::VectorXd out(space.size());
  for (int i = 0; i < mesh.node_count(); ++i) {
    out.segment<2>(VectorP1Space::index(i, 0)) = g(mesh.nodes[static_cast<std::size_t>(i)]);
  }
  return out;
}

double evaluate(const ScalarP1Space& space, const Eigen::VectorXd& dofs, const Eigen::Vector2d& x) {
  const auto& mesh = space.mesh();
  const int tri = locate(mesh, x);
  const Eigen::Vector3d lam = barycentric(element_geometry(mesh, tri), x);
  const auto& t = mesh.triangles[static_cast<std::size_t>(tri)];
  return lam(0) * dofs(t[0]) + lam(1) * dofs(t[1]) + lam(2) * dofs(t[2]);
}

Eigen::Vector2d evaluate(const VectorP1Space& space, const Eigen::VectorXd& dofs, const Eigen::Vector2d& x) {
  const auto& mesh = space.mesh();
  const int tri = locate(mesh, x);
  const Eigen::Vector3d lam = barycentric(element_geometry(mesh, tri), x);
  const auto& t = mesh.triangles[static_cast<std::size_t>(tri)];
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (int a = 0; a < 3; ++a) v += lam(a) * dofs.segment<2>(VectorP1Space::index(t[static_cast<std::size_t>(a)], 0));
  return v;
}

Eigen::SparseMatrix<double> mass_matrix(const ScalarP1Space& space, const QuadratureRule& rule,
                                        const ScalarField& weight) {
  const auto& mesh = space.mesh();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(9 * mesh.triangle_count()));
  for (int e = 0; e < mesh.triangle_count(); ++e) {
    const auto geo = element_geometry(mesh, e);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    for (int q = 0; q < rule.size(); ++q) {
      const auto& ref = rule.points[static_cast<std::size_t>(q)];
      const Eigen::Vector3d lam = reference_basis(ref);
      const double w = 2.0 * geo.area * rule.weights[static_cast<std::size_t>(q)] *
                       (weight ? weight(geo.map(ref)) : 1.0);
      local.noalias() += w * lam * lam.transpose();
    }
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trip.emplace_back(t[static_cast<std::size_t>(a)], t[static_cast<std::size_t>(b)], local(a, b));
  }
  Eigen::SparseMatrix<double> M(space.size(), space.size());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

Eigen::VectorXd l2_project(const ScalarP1Space& space, const ScalarField& g, const QuadratureRule& rule) {
  const auto& mesh = space.mesh();
  Eigen::VectorXd load = Eigen::VectorXd::Zero(space.size());
  for (int e = 0; e < mesh.triangle_count(); ++e) {
    const auto geo = element_geometry(mesh, e);
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    for (int q = 0; q < rule.size(); ++q) {
      const auto& ref = rule.points[static_cast<std::size_t>(q)];
      const Eigen::Vector3d lam = reference_basis(ref);
      const double w = 2.0 * geo.area * rule.weights[static_cast<std::size_t>(q)] * g(geo.map(ref));
      for (int a = 0; a < 3; ++a) load(t[static_cast<std::size_t>(a)]) += w * lam(a);
    }
  }
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(mass_matrix(space, rule));
  if (llt.info() != Eigen::Success) throw std::runtime_error("l2_project: mass matrix factorization failed");
  Eigen::VectorXd x = llt.solve(load);
  if (llt.info() != Eigen::Success) throw std::runtime_error("l2_project: mass matrix solve failed");
  return x;
}

namespace {

template <typename Integrand>
double integrate(const StructuredTriMesh& mesh, const QuadratureRule& rule, Integrand&& fn) {
  double total = 0.0;
  for (int e = 0; e < mesh.triangle_count(); ++e) {
    const auto geo = element_geometry(mesh, e);
    double local = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      const auto& ref = rule.points[static_cast<std::size_t>(q)];
      local += rule.weights[static_cast<std::size_t>(q)] * fn(e, reference_basis(ref), geo.map(ref));
    }
    total += 2.0 * geo.area * local;
  }
  return total;
}

}  // namespace

double norm(const ScalarP1Space& space, const Eigen::VectorXd& dofs, double p, const ScalarField& against,
            const QuadratureRule& rule) {
  const auto& mesh = space.mesh();
  const double integral = integrate(mesh, rule, [&](int e, const Eigen::Vector3d& lam, const Eigen::Vector2d& x) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    double u = lam(0) * dofs(t[0]) + lam(1) * dofs(t[1]) + lam(2) * dofs(t[2]);
    if (against) u -= against(x);
    return std::pow(std::abs(u), p);
  });
  return std::pow(integral, 1.0 / p);
}

double norm(const VectorP1Space& space, const Eigen::VectorXd& dofs, double p, const VectorField& against,
            const QuadratureRule& rule) {
  const auto& mesh = space.mesh();
  const double integral = integrate(mesh, rule, [&](int e, const Eigen::Vector3d& lam, const Eigen::Vector2d& x) {
    const auto& t = mesh.triangles[static_cast<std::size_t>(e)];
    Eigen::Vector2d u = Eigen::Vector2d::Zero();
    for (int a = 0; a < 3; ++a) u += lam(a) * dofs.segment<2>(VectorP1Space::index(t[static_cast<std::size_t>(a)], 0));
    if (against) u -= against(x);
    return std::pow(u.norm(), p);
  });
  return std::pow(integral, 1.0 / p);
}

double function_norm(const StructuredTriMesh& mesh, const ScalarField& g, double p, const QuadratureRule& rule) {
  const double integral = integrate(mesh, rule, [&](int, const Eigen::Vector3d&, const Eigen::Vector2d& x) {
    return std::pow(std::abs(g(x)), p);
  });
  return std::pow(integral, 1.0 / p);
}

double function_norm(const StructuredTriMesh& mesh, const VectorField& g, double p, const QuadratureRule& rule) {
  const double integral = integrate(mesh, rule, [&](int, const Eigen::Vector3d&, const Eigen::Vector2d& x) {
    return std::pow(g(x).norm(), p);
  });
  return std::pow(integral, 1.0 / p);
}

double element_divergence(const VectorP1Space& space, const Eigen::VectorXd& dofs, int tri) {
  const auto& mesh = space.mesh();
  const auto geo = element_geometry(mesh, tri);
  const auto& t = mesh.triangles[static_cast<std::size_t>(tri)];
  double div = 0.0;
  for (int a = 0; a < 3; ++a) {
    div += geo.grad.row(a).dot(dofs.segment<2>(VectorP1Space::index(t[static_cast<std::size_t>(a)], 0)));
  }
  return div;
}

}  // namespace mixfem
