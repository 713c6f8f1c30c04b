#pragma once

#include <functional>
#include <string>
#include <variant>

#include <Eigen/Core>

#include "goalfem/problem.hpp"
#include "goalfem/spaces.hpp"
#include "goalfem/weightnet.hpp"

namespace goalfem {

/// Discrete operators of the mixed system. A is the weighted Gram matrix on
/// the test space (m x m SPD), B couples trial to test (m x n, independent
/// of the weight), Q holds one QoI vector per column (n x k).
struct AssembledSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd Q;
  int m = 0;
  int n = 0;

  int qoi_count() const { return static_cast<int>(Q.cols()); }
};

/// Quadrature of the weighted test-space inner product, with the
/// weight-independent data (points, jacobian-scaled weights, basis stacks)
/// cached so the matrix can be reassembled cheaply for many weights. Also
/// provides the pointwise integrand pairing needed by the training adjoint.
class GramOperator {
 public:
  GramOperator(const Space1D& test, FormKind form);
  GramOperator(const Space2D& test, FormKind form);

  int quad_point_count() const { return static_cast<int>(quad_weights_.size()); }
  /// Physical quadrature points, dim x np.
  const Eigen::MatrixXd& points() const { return points_; }
  const Eigen::VectorXd& quad_weights() const { return quad_weights_; }
  int dim() const { return dim_; }

  Eigen::VectorXd eval_weight(const WeightNet& net) const;
  Eigen::VectorXd eval_weight(const std::function<double(const double*)>& w) const;

  /// A(omega) given the weight values at the quadrature points.
  Eigen::MatrixXd assemble(const Eigen::VectorXd& omega_at_points) const;

  /// Pointwise integrand pairing D(a,b) at every quadrature point, where a, b
  /// are coefficient vectors on the test space and D is the inner-product
  /// integrand without the weight (gradients dotted or values multiplied).
  Eigen::VectorXd pairing(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;

 private:
  int dim_;
  int ncomp_;  // components paired per point: 1 for L2, dim for gradients
  int nloc_;
  int points_per_element_;
  Eigen::MatrixXi dofs_;        // nloc x nel
  Eigen::MatrixXd points_;      // dim x np
  Eigen::VectorXd quad_weights_;
  Eigen::MatrixXd stack_;       // nloc x (np * ncomp), per-point component blocks
  int dof_count_;
};

Eigen::MatrixXd assemble_gram(const Space1D& test, const WeightNet& net, const ProblemDefinition& problem);
Eigen::MatrixXd assemble_gram(const Space2D& test, const WeightNet& net, const ProblemDefinition& problem);

Eigen::MatrixXd assemble_bilinear(const Space1D& trial, const Space1D& test, const ProblemDefinition& problem);
Eigen::MatrixXd assemble_bilinear(const Space2D& trial, const Space2D& test, const ProblemDefinition& problem);

Eigen::VectorXd assemble_load(const Space1D& test, const ProblemDefinition& problem, double lambda);
Eigen::VectorXd assemble_load(const Space2D& test, const ProblemDefinition& problem, double lambda);

Eigen::VectorXd assemble_qoi(const Space1D& trial, const QoiSpec& qoi);
Eigen::VectorXd assemble_qoi(const Space2D& trial, const QoiSpec& qoi);

AssembledSystem assemble_system(const Space1D& trial, const Space1D& test, const WeightNet& net,
                                const ProblemDefinition& problem);
AssembledSystem assemble_system(const Space2D& trial, const Space2D& test, const WeightNet& net,
                                const ProblemDefinition& problem);

void write_matrix_csv(const Eigen::MatrixXd& mat, const std::string& path);

}  // namespace goalfem
