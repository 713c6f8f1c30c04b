#pragma once

#include <array>
#include <memory>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "goalfem/mesh.hpp"
#include "goalfem/quadrature.hpp"

namespace goalfem {

enum class BoundaryCondition { none, left_dirichlet, full_dirichlet };

/// Basis values and physical-space gradients at a set of points on one
/// element: one row per local basis function, one column per point.
struct BasisEval {
  Eigen::MatrixXd values;
  std::array<Eigen::MatrixXd, 2> grad;  // grad[1] is empty in 1D
};

/// Continuous piecewise-linear space on an interval mesh. Degrees of freedom
/// are the unconstrained nodes, numbered left to right.
class Space1D {
 public:
  Space1D(Mesh1D mesh, int degree, BoundaryCondition bc);

  const Mesh1D& mesh() const { return *mesh_; }
  int degree() const { return 1; }
  BoundaryCondition bc() const { return bc_; }
  int dof_count() const { return dof_count_; }
  int dofs_per_element() const { return 2; }

  /// Global dof of local node k (0 = left, 1 = right) on element e, or -1
  /// when the node is constrained.
  int dof(int e, int k) const;
  double dof_node(int j) const;

  /// Basis values and derivatives at reference coordinates t in [0,1].
  BasisEval eval_basis(int e, const Eigen::VectorXd& local_points) const;

  /// Evaluate the FE function with the given coefficients at physical x.
  double value(const Eigen::VectorXd& coeffs, double x) const;
  double derivative(const Eigen::VectorXd& coeffs, double x) const;

 private:
  std::shared_ptr<const Mesh1D> mesh_;
  BoundaryCondition bc_;
  int dof_count_ = 0;
};

/// Conforming P1/P2 space on a triangulation. P2 adds one dof per interior
/// edge midpoint. Dofs are ordered lexicographically by node coordinate.
class Space2D {
 public:
  Space2D(Mesh2D mesh, int degree, BoundaryCondition bc);

  const Mesh2D& mesh() const { return *mesh_; }
  int degree() const { return degree_; }
  BoundaryCondition bc() const { return bc_; }
  int dof_count() const { return dof_count_; }
  int dofs_per_element() const { return degree_ == 1 ? 3 : 6; }

  /// Global dof of local entity k on triangle t (vertices 0..2, then edges
  /// (0,1),(1,2),(2,0) for P2); -1 when constrained.
  int dof(int t, int k) const { return element_dofs_[t][k]; }
  Eigen::Vector2d dof_point(int j) const { return dof_points_[j]; }

  /// Basis values and gradients at reference coordinates (xi, eta).
  BasisEval eval_basis(int t, const Eigen::MatrixXd& local_points) const;

  /// Triangle containing the point (first match in index order) and its
  /// reference coordinates there.
  std::pair<int, Eigen::Vector2d> locate(const Eigen::Vector2d& x) const;

  double value(const Eigen::VectorXd& coeffs, const Eigen::Vector2d& x) const;

  /// Affine map data for triangle t.
  const Eigen::Matrix2d& inv_jacobian_t(int t) const { return inv_jt_[t]; }
  double jacobian_det(int t) const { return det_j_[t]; }
  Eigen::Vector2d to_physical(int t, const Eigen::Vector2d& ref) const;

 private:
  std::shared_ptr<const Mesh2D> mesh_;
  int degree_;
  BoundaryCondition bc_;
  int dof_count_ = 0;
  std::vector<std::array<int, 6>> element_dofs_;
  std::vector<Eigen::Vector2d> dof_points_;
  std::vector<Eigen::Matrix2d> inv_jt_;
  std::vector<double> det_j_;
};

}  // namespace goalfem
