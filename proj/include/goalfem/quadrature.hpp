#pragma once

#include <Eigen/Core>

namespace goalfem {

enum class ElementKind { interval, triangle };

/// Rule on the reference element: [0,1] for intervals, the unit triangle
/// {(0,0),(1,0),(0,1)} otherwise. Weights sum to the reference measure and
/// the rule is exact for polynomials up to `order`.
struct QuadratureRule {
  Eigen::MatrixXd points;   // np x dim
  Eigen::VectorXd weights;  // np, all positive
  int order = 0;

  int size() const { return static_cast<int>(weights.size()); }
};

QuadratureRule quadrature_rule(ElementKind kind, int order);

/// Gauss-Legendre on [0,1] with n points (exact to degree 2n-1).
QuadratureRule gauss_legendre_01(int n);

}  // namespace goalfem
