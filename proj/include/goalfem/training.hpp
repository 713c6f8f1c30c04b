#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "goalfem/assembly.hpp"
#include "goalfem/problem.hpp"
#include "goalfem/solver.hpp"
#include "goalfem/spaces.hpp"
#include "goalfem/weightnet.hpp"

namespace goalfem {

struct TrainingSample {
  double lambda;
  Eigen::VectorXd qoi_ref;  // one reference per QoI functional
};
using TrainingSet = std::vector<TrainingSample>;

enum class OptimizerKind { adam, gradient_descent };
enum class StopReason { tolerance_reached, max_iterations, gradient_stalled };

std::string to_string(OptimizerKind k);
std::string to_string(StopReason r);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::adam;
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_iterations = 100000;
  double tolerance = 9e-7;
  double gradient_tolerance = 1e-12;
  std::uint64_t seed = 42;
};

struct TrainingRecord {
  int iteration;
  double loss;
  double grad_norm;
  double wall_ms;
};

struct TrainingRun {
  TrainConfig config;
  Eigen::VectorXd theta;  // best parameters seen
  double final_loss = 0.0;
  StopReason stop = StopReason::max_iterations;
  int iterations = 0;
  std::vector<TrainingRecord> history;
};

/// Anything the first-order optimizers can minimize.
class LossModel {
 public:
  virtual ~LossModel() = default;
  virtual int param_count() const = 0;
  virtual double loss(const Eigen::VectorXd& theta) const = 0;
  virtual double loss_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const = 0;
};

/// Everything about the discrete method that stays fixed while the weight is
/// trained: spaces, problem, B, Q, and the cached Gram quadrature. Only the
/// Gram matrix depends on theta.
class MixedDiscretization {
 public:
  MixedDiscretization(Space1D trial, Space1D test, ProblemDefinition problem, int neuron_count,
                      GKind g_kind);
  MixedDiscretization(Space2D trial, Space2D test, ProblemDefinition problem, int neuron_count,
                      GKind g_kind);

  int dim() const { return problem_.dim(); }
  int trial_dim() const { return static_cast<int>(b_.cols()); }
  int test_dim() const { return static_cast<int>(b_.rows()); }
  int qoi_count() const { return static_cast<int>(q_.cols()); }
  int param_count() const { return arch_.param_count(); }
  const ProblemDefinition& problem() const { return problem_; }
  const Eigen::MatrixXd& bilinear() const { return b_; }
  const Eigen::MatrixXd& qoi_vectors() const { return q_; }
  const GramOperator& gram() const { return gram_; }
  const Space1D& trial_1d() const { return *trial_1d_; }
  const Space2D& trial_2d() const { return *trial_2d_; }

  WeightNet make_net(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd assemble_load(double lambda) const;
  Eigen::MatrixXd assemble_gram(const Eigen::VectorXd& theta) const;
  AssembledSystem system(const Eigen::VectorXd& theta) const;
  CondensedOperator condense(const Eigen::VectorXd& theta) const;

 private:
  ProblemDefinition problem_;
  std::optional<Space1D> trial_1d_, test_1d_;
  std::optional<Space2D> trial_2d_, test_2d_;
  WeightNet arch_;  // zero parameters; defines architecture
  GramOperator gram_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd q_;
};

/// The QoI-misfit loss J(theta) = 1/2 sum_i sum_k |q_k(u_h,i) - ref_ik|^2,
/// with the analytic gradient obtained by adjoint solves through the
/// condensed linear map (only A depends on theta).
class MixedQoiLoss final : public LossModel {
 public:
  MixedQoiLoss(const MixedDiscretization& disc, TrainingSet set);

  int param_count() const override { return disc_->param_count(); }
  double loss(const Eigen::VectorXd& theta) const override;
  double loss_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const override;

 private:
  const MixedDiscretization* disc_;
  TrainingSet set_;
  std::vector<Eigen::VectorXd> loads_;  // per-sample L, independent of theta
};

/// Relative-error loss for the closed-form 1D diffusion experiment: the
/// discrete QoI comes from the exact optimal test function phi = int 1/omega
/// rather than a mixed solve.
class OptimalTestRelLoss final : public LossModel {
 public:
  OptimalTestRelLoss(int neuron_count, GKind g_kind, double x0, std::vector<double> lambdas,
                     int subintervals = 1024);

  int param_count() const override { return arch_.param_count(); }
  double loss(const Eigen::VectorXd& theta) const override;
  double loss_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const override;
  WeightNet make_net(const Eigen::VectorXd& theta) const;

 private:
  WeightNet arch_;
  double x0_;
  std::vector<double> lambdas_;
  std::vector<double> grid_;        // composite boundaries; every lambda is one
  std::vector<int> lambda_cell_;    // grid index of each lambda
};

double loss(const Eigen::VectorXd& theta, const TrainingSet& set, const MixedDiscretization& disc);
Eigen::VectorXd grad_loss(const Eigen::VectorXd& theta, const TrainingSet& set,
                          const MixedDiscretization& disc);

TrainingRun train(const TrainConfig& config, const LossModel& model, Eigen::VectorXd theta0);

struct SweepRow {
  double lambda;
  int qoi_index;
  double qoi_discrete;
  double qoi_exact;
  double abs_error;
  double rel_error;
};

/// Error table over a lambda grid, one row per (lambda, QoI).
std::vector<SweepRow> qoi_error_sweep(const std::function<Eigen::VectorXd(double)>& discrete_qoi,
                                      const std::function<Eigen::VectorXd(double)>& exact_qoi,
                                      const std::vector<double>& lambdas);
std::vector<SweepRow> qoi_error_sweep(const MixedDiscretization& disc, const Eigen::VectorXd& theta,
                                      const std::vector<double>& lambdas,
                                      const std::function<Eigen::VectorXd(double)>& exact_qoi);

struct ScanRow {
  double theta1;
  double rel_error;
};

/// Sweep the slope of the two-parameter sigmoid weight with the intercept
/// held fixed, reporting the exact-optimal-test relative QoI error.
std::vector<ScanRow> theta1_error_scan(double theta2, double lambda, double x0, double begin,
                                       double end, double step, int subintervals = 1024);

std::vector<double> linspace(double a, double b, int count);

}  // namespace goalfem
