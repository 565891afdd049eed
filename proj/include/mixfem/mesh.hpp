#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mixfem {

/// Uniform triangulation of the unit square: n x n squares, each split
/// along its lower-left to upper-right diagonal. Node (i, j) has index
/// j * (n + 1) + i and sits at (i h, j h).
struct StructuredTriMesh {
  int n_cells_per_side{0};
  double h{0.0};
  std::vector<Eigen::Vector2d> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary_nodes;
  std::vector<char> on_boundary;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
};

StructuredTriMesh build_mesh(int n);

/// Plain-text dump: one "x y" line per node, then one "i j k" line per triangle.
void write_mesh(std::ostream& os, const StructuredTriMesh& mesh);

/// Affine data of one triangle: vertices, area, and the constant gradients
/// of the three barycentric (P1 nodal) basis functions, one per row.
struct ElementGeometry {
  std::array<Eigen::Vector2d, 3> vertices;
  double area{0.0};
  Eigen::Matrix<double, 3, 2> grad;

  Eigen::Vector2d map(const Eigen::Vector2d& ref) const {
    return vertices[0] + ref.x() * (vertices[1] - vertices[0]) + ref.y() * (vertices[2] - vertices[0]);
  }
};

ElementGeometry element_geometry(const StructuredTriMesh& mesh, int tri);

/// Barycentric coordinates of x in triangle tri.
Eigen::Vector3d barycentric(const ElementGeometry& geo, const Eigen::Vector2d& x);

/// Triangle containing x (points on shared edges resolve deterministically).
int locate(const StructuredTriMesh& mesh, const Eigen::Vector2d& x);

/// Points and weights on the reference triangle (0,0), (1,0), (0,1).
/// Weights sum to 1/2.
struct QuadratureRule {
  int order{0};
  std::vector<Eigen::Vector2d> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// Exact up to the given polynomial degree; supported orders 1, 2, 4, 5.
/// Order 3 returns the order-4 rule.
QuadratureRule triangle_rule(int order);

class ScalarP1Space {
 public:
  explicit ScalarP1Space(const StructuredTriMesh& mesh) : mesh_(&mesh) {}
  const StructuredTriMesh& mesh() const { return *mesh_; }
  int size() const { return mesh_->node_count(); }

 private:
  const StructuredTriMesh* mesh_;
};

/// Two scalar P1 components interleaved: dof 2 * node + component.
class VectorP1Space {
 public:
  explicit VectorP1Space(const StructuredTriMesh& mesh) : mesh_(&mesh) {}
  const StructuredTriMesh& mesh() const { return *mesh_; }
  int size() const { return 2 * mesh_->node_count(); }
  static int index(int node, int component) { return 2 * node + component; }

 private:
  const StructuredTriMesh* mesh_;
};

using ScalarField = std::function<double(const Eigen::Vector2d&)>;
using VectorField = std::function<Eigen::Vector2d(const Eigen::Vector2d&)>;

Eigen::VectorXd interpolate(const ScalarP1Space& space, const ScalarField& g);
Eigen::VectorXd interpolate(const VectorP1Space& space, const VectorField& g);

/// Value of a P1 field at a point.
double evaluate(const ScalarP1Space& space, const Eigen::VectorXd& dofs, const Eigen::Vector2d& x);
Eigen::Vector2d evaluate(const VectorP1Space& space, const Eigen::VectorXd& dofs, const Eigen::Vector2d& x);

/// Weighted scalar mass matrix (w phi_i, phi_j); weight defaults to 1.
Eigen::SparseMatrix<double> mass_matrix(const ScalarP1Space& space, const QuadratureRule& rule,
                                        const ScalarField& weight = {});

/// L2 projection with quadrature-evaluated load vector. Throws
/// std::runtime_error if the mass-matrix factorization fails.
Eigen::VectorXd l2_project(const ScalarP1Space& space, const ScalarField& g,
                           const QuadratureRule& rule = triangle_rule(4));

/// (int |u_h - u|^p)^(1/p) by element quadrature; u defaults to zero.
double norm(const ScalarP1Space& space, const Eigen::VectorXd& dofs, double p,
            const ScalarField& against = {}, const QuadratureRule& rule = triangle_rule(4));
double norm(const VectorP1Space& space, const Eigen::VectorXd& dofs, double p,
            const VectorField& against = {}, const QuadratureRule& rule = triangle_rule(4));

/// (int |g|^p)^(1/p) of a pointwise function.
double function_norm(const StructuredTriMesh& mesh, const ScalarField& g, double p,
                     const QuadratureRule& rule = triangle_rule(4));
double function_norm(const StructuredTriMesh& mesh, const VectorField& g, double p,
                     const QuadratureRule& rule = triangle_rule(4));

/// Constant divergence of a P1 vector field on one triangle.
double element_divergence(const VectorP1Space& space, const Eigen::VectorXd& dofs, int tri);

}  // namespace mixfem
