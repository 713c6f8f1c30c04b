#pragma once

#include <functional>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "goalfem/assembly.hpp"
#include "goalfem/weightnet.hpp"

namespace goalfem {

/// Solution of the mixed saddle-point system: the residual representative r
/// (test-space coefficients) and the discrete solution u (trial-space
/// coefficients). Satisfies A r + B u = L and B^T r = 0.
struct MixedSolution {
  Eigen::VectorXd residual;
  Eigen::VectorXd u;
};

/// Static condensation of the mixed system. Stores the A factorization, the
/// Schur complement S = B^T A^-1 B with its factorization, B^T A^-1, and the
/// QoI map Q^T S^-1 B^T A^-1 used for online evaluation. Immutable once
/// built; concurrent online evaluations are safe.
class CondensedOperator {
 public:
  static CondensedOperator condense(const AssembledSystem& system);

  int m() const { return m_; }
  int n() const { return n_; }
  int qoi_count() const { return static_cast<int>(qoi_map_.rows()); }

  Eigen::VectorXd solve_u(const Eigen::VectorXd& load) const;
  MixedSolution solve_mixed(const Eigen::VectorXd& load) const;
  /// One value per QoI; only touches the stored k x m map.
  Eigen::VectorXd online_qoi(const Eigen::VectorXd& load) const;

  const Eigen::MatrixXd& bt_a_inv() const { return bt_a_inv_; }
  const Eigen::MatrixXd& schur() const { return schur_; }
  const Eigen::MatrixXd& qoi_map() const { return qoi_map_; }
  const Eigen::MatrixXd& qoi_vectors() const { return q_; }
  const Eigen::LLT<Eigen::MatrixXd>& a_factor() const { return a_llt_; }
  const Eigen::LLT<Eigen::MatrixXd>& schur_factor() const { return s_llt_; }

  /// Write the online artifact: header (magic, version, m, n, qoi count),
  /// then Q and the QoI map as little-endian 64-bit floats.
  void save(const std::string& path) const;

 private:
  int m_ = 0, n_ = 0;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd q_;          // n x k
  Eigen::LLT<Eigen::MatrixXd> a_llt_;
  Eigen::LLT<Eigen::MatrixXd> s_llt_;
  Eigen::MatrixXd a_inv_b_;    // m x n
  Eigen::MatrixXd bt_a_inv_;   // n x m
  Eigen::MatrixXd schur_;      // n x n
  Eigen::MatrixXd qoi_map_;    // k x m
};

/// The online artifact loaded back from disk: enough to evaluate QoIs for
/// arbitrary loads, nothing else.
struct OnlineOperator {
  int m = 0, n = 0;
  Eigen::MatrixXd qoi_vectors;  // n x k
  Eigen::MatrixXd qoi_map;      // k x m

  Eigen::VectorXd online_qoi(const Eigen::VectorXd& load) const;
  static OnlineOperator load(const std::string& path);
};

MixedSolution solve_mixed(const AssembledSystem& system, const Eigen::VectorXd& load);

/// The optimal test function of the 1D diffusion problem paired with the
/// trial function x: phi(x) = int_0^x 1/omega. Evaluated by composite Gauss
/// quadrature with cached prefix integrals over [0,1].
class OptimalTestFunction1D {
 public:
  explicit OptimalTestFunction1D(const WeightNet& net, int subintervals = 2048);

  double operator()(double x) const;
  double at_one() const { return prefix_.back(); }

 private:
  WeightNet net_;
  int subintervals_;
  std::vector<double> prefix_;  // integral from 0 to i/subintervals
};

OptimalTestFunction1D optimal_test_function_1d(const WeightNet& net, int subintervals = 2048);

/// Relative QoI error of the exact-optimal-test Petrov-Galerkin solution of
/// the 1D diffusion benchmark with trial function x:
///   |1 - phi(lambda)/phi(1)|              for x0 <= lambda
///   |1 - (x0/lambda) phi(lambda)/phi(1)|  for x0 >= lambda
double optimal_test_rel_error(const OptimalTestFunction1D& phi, double lambda, double x0);

}  // namespace goalfem
