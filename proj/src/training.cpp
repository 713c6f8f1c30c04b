#include "goalfem/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "goalfem/csv.hpp"
#include "goalfem/errors.hpp"
#include "goalfem/parallel.hpp"
#include "goalfem/quadrature.hpp"

namespace goalfem {

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::adam ? "adam" : "gradient_descent";
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::tolerance_reached: return "tolerance_reached";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::gradient_stalled: return "gradient_stalled";
  }
  return "?";
}

MixedDiscretization::MixedDiscretization(Space1D trial, Space1D test, ProblemDefinition problem,
                                         int neuron_count, GKind g_kind)
    : problem_(std::move(problem)),
      trial_1d_(std::move(trial)),
      test_1d_(std::move(test)),
      arch_(WeightNet::make(1, neuron_count, g_kind)),
      gram_(*test_1d_, problem_.form) {
  if (problem_.dim() != 1) throw ConfigError("discretization: 1D spaces need a 1D problem");
  b_ = assemble_bilinear(*trial_1d_, *test_1d_, problem_);
  q_.resize(trial_1d_->dof_count(), problem_.qois.size());
  for (std::size_t k = 0; k < problem_.qois.size(); ++k) {
    q_.col(k) = assemble_qoi(*trial_1d_, problem_.qois[k]);
  }
}

MixedDiscretization::MixedDiscretization(Space2D trial, Space2D test, ProblemDefinition problem,
                                         int neuron_count, GKind g_kind)
    : problem_(std::move(problem)),
      trial_2d_(std::move(trial)),
      test_2d_(std::move(test)),
      arch_(WeightNet::make(2, neuron_count, g_kind)),
      gram_(*test_2d_, problem_.form) {
  if (problem_.dim() != 2) throw ConfigError("discretization: 2D spaces need a 2D problem");
  b_ = assemble_bilinear(*trial_2d_, *test_2d_, problem_);
  q_.resize(trial_2d_->dof_count(), problem_.qois.size());
  for (std::size_t k = 0; k < problem_.qois.size(); ++k) {
    q_.col(k) = assemble_qoi(*trial_2d_, problem_.qois[k]);
  }
}

WeightNet MixedDiscretization::make_net(const Eigen::VectorXd& theta) const {
  WeightNet net = arch_;
  if (theta.size() != net.param_count()) throw ConfigError("theta length does not match architecture");
  net.theta = theta;
  return net;
}

Eigen::VectorXd MixedDiscretization::assemble_load(double lambda) const {
  return dim() == 1 ? goalfem::assemble_load(*test_1d_, problem_, lambda)
                    : goalfem::assemble_load(*test_2d_, problem_, lambda);
}

Eigen::MatrixXd MixedDiscretization::assemble_gram(const Eigen::VectorXd& theta) const {
  WeightNet net = make_net(theta);
  return gram_.assemble(gram_.eval_weight(net));
}

AssembledSystem MixedDiscretization::system(const Eigen::VectorXd& theta) const {
  AssembledSystem sys;
  sys.A = assemble_gram(theta);
  sys.B = b_;
  sys.Q = q_;
  sys.m = test_dim();
  sys.n = trial_dim();
  return sys;
}

CondensedOperator MixedDiscretization::condense(const Eigen::VectorXd& theta) const {
  return CondensedOperator::condense(system(theta));
}

MixedQoiLoss::MixedQoiLoss(const MixedDiscretization& disc, TrainingSet set)
    : disc_(&disc), set_(std::move(set)) {
  loads_.reserve(set_.size());
  for (const auto& sample : set_) {
    if (sample.qoi_ref.size() != disc.qoi_count()) {
      throw ConfigError("training sample has the wrong number of reference QoIs");
    }
    loads_.push_back(disc.assemble_load(sample.lambda));
  }
}

double MixedQoiLoss::loss(const Eigen::VectorXd& theta) const {
  WeightNet net = disc_->make_net(theta);
  const GramOperator& gram = disc_->gram();
  Eigen::MatrixXd A = gram.assemble(gram.eval_weight(net));
  Eigen::LLT<Eigen::MatrixXd> allt(A);
  if (allt.info() != Eigen::Success) throw NumericalError("gram matrix A is not positive definite");
  const Eigen::MatrixXd& B = disc_->bilinear();
  Eigen::MatrixXd ainv_b = allt.solve(B);
  Eigen::MatrixXd S = B.transpose() * ainv_b;
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> sllt(S);
  if (sllt.info() != Eigen::Success) {
    throw NumericalError("Schur complement is not positive definite (inf-sup violation)");
  }
  double j = 0.0;
  for (std::size_t i = 0; i < set_.size(); ++i) {
    Eigen::VectorXd y = allt.solve(loads_[i]);
    Eigen::VectorXd u = sllt.solve(B.transpose() * y);
    Eigen::VectorXd e = disc_->qoi_vectors().transpose() * u - set_[i].qoi_ref;
    j += 0.5 * e.squaredNorm();
  }
  return j;
}

double MixedQoiLoss::loss_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  WeightNet net = disc_->make_net(theta);
  const GramOperator& gram = disc_->gram();
  Eigen::MatrixXd A = gram.assemble(gram.eval_weight(net));
  Eigen::LLT<Eigen::MatrixXd> allt(A);
  if (allt.info() != Eigen::Success) throw NumericalError("gram matrix A is not positive definite");
  const Eigen::MatrixXd& B = disc_->bilinear();
  const Eigen::MatrixXd& Q = disc_->qoi_vectors();
  Eigen::MatrixXd ainv_b = allt.solve(B);
  Eigen::MatrixXd S = B.transpose() * ainv_b;
  S = 0.5 * (S + S.transpose()).eval();
  Eigen::LLT<Eigen::MatrixXd> sllt(S);
  if (sllt.info() != Eigen::Success) {
    throw NumericalError("Schur complement is not positive definite (inf-sup violation)");
  }

  int m = disc_->test_dim();
  int kq = disc_->qoi_count();
  double j = 0.0;
  // rho_k collects sum_i e_ik r_i so the quadrature pass below only pairs
  // one vector per QoI against its adjoint.
  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(m, kq);
  for (std::size_t i = 0; i < set_.size(); ++i) {
    Eigen::VectorXd y = allt.solve(loads_[i]);
    Eigen::VectorXd u = sllt.solve(B.transpose() * y);
    Eigen::VectorXd r = y - ainv_b * u;
    Eigen::VectorXd e = Q.transpose() * u - set_[i].qoi_ref;
    j += 0.5 * e.squaredNorm();
    for (int k = 0; k < kq; ++k) rho.col(k) += e[k] * r;
  }

  int np = gram.quad_point_count();
  Eigen::VectorXd pair_sum = Eigen::VectorXd::Zero(np);
  for (int k = 0; k < kq; ++k) {
    Eigen::VectorXd gk = ainv_b * sllt.solve(Q.col(k));
    pair_sum += gram.pairing(gk, rho.col(k));
  }
  grad = Eigen::VectorXd::Zero(param_count());
  Eigen::VectorXd wg(param_count());
  const Eigen::VectorXd& wq = gram.quad_weights();
  for (int q = 0; q < np; ++q) {
    net.weight_grad(gram.points().col(q).data(), wg);
    grad.noalias() -= (wq[q] * pair_sum[q]) * wg;
  }
  return j;
}

OptimalTestRelLoss::OptimalTestRelLoss(int neuron_count, GKind g_kind, double x0,
                                       std::vector<double> lambdas, int subintervals)
    : arch_(WeightNet::make(1, neuron_count, g_kind)), x0_(x0), lambdas_(std::move(lambdas)) {
  grid_.reserve(subintervals + lambdas_.size() + 1);
  for (int i = 0; i <= subintervals; ++i) grid_.push_back(static_cast<double>(i) / subintervals);
  for (double lam : lambdas_) {
    if (lam <= 0.0 || lam > 1.0) throw ConfigError("relative-error loss needs lambda in (0,1]");
    grid_.push_back(lam);
  }
  std::sort(grid_.begin(), grid_.end());
  grid_.erase(std::unique(grid_.begin(), grid_.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-15; }),
              grid_.end());
  lambda_cell_.resize(lambdas_.size());
  for (std::size_t i = 0; i < lambdas_.size(); ++i) {
    auto it = std::lower_bound(grid_.begin(), grid_.end(), lambdas_[i] - 1e-15);
    lambda_cell_[i] = static_cast<int>(it - grid_.begin());
  }
}

WeightNet OptimalTestRelLoss::make_net(const Eigen::VectorXd& theta) const {
  WeightNet net = arch_;
  if (theta.size() != net.param_count()) throw ConfigError("theta length does not match architecture");
  net.theta = theta;
  return net;
}

double OptimalTestRelLoss::loss(const Eigen::VectorXd& theta) const {
  // The quadrature pass dominates either way; share one implementation.
  Eigen::VectorXd grad;
  return loss_and_grad(theta, grad);
}

double OptimalTestRelLoss::loss_and_grad(const Eigen::VectorXd& theta, Eigen::VectorXd& grad) const {
  WeightNet net = make_net(theta);
  int p = param_count();
  const QuadratureRule& rule = gauss_legendre_01(5);

  // Running prefix of phi and d(phi)/dtheta over the composite grid, with
  // the values captured at every training lambda and at 1.
  std::size_t ns = lambdas_.size();
  std::vector<double> phi_at(ns);
  std::vector<Eigen::VectorXd> dphi_at(ns);
  double phi = 0.0;
  Eigen::VectorXd dphi = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd wg(p);
  std::size_t cell = 0;
  for (std::size_t s = 0; s + 1 < grid_.size(); ++s) {
    double a = grid_[s];
    double len = grid_[s + 1] - a;
    for (int q = 0; q < rule.size(); ++q) {
      double x = a + len * rule.points(q, 0);
      double w = len * rule.weights[q];
      double omega = net.weight_grad(&x, wg);
      phi += w / omega;
      dphi.noalias() -= (w / (omega * omega)) * wg;
    }
    cell = s + 1;
    for (std::size_t i = 0; i < ns; ++i) {
      if (lambda_cell_[i] == static_cast<int>(cell)) {
        phi_at[i] = phi;
        dphi_at[i] = dphi;
      }
    }
  }
  double phi1 = phi;
  Eigen::VectorXd dphi1 = dphi;

  double j = 0.0;
  grad = Eigen::VectorXd::Zero(p);
  for (std::size_t i = 0; i < ns; ++i) {
    double lam = lambdas_[i];
    double c = (x0_ <= lam) ? 1.0 : x0_ / lam;
    double ratio = phi_at[i] / phi1;
    Eigen::VectorXd dratio = (dphi_at[i] * phi1 - phi_at[i] * dphi1) / (phi1 * phi1);
    double err_signed = 1.0 - c * ratio;
    j += 0.5 * err_signed * err_signed;
    grad.noalias() += err_signed * (-c) * dratio;
  }
  return j;
}

double loss(const Eigen::VectorXd& theta, const TrainingSet& set, const MixedDiscretization& disc) {
  return MixedQoiLoss(disc, set).loss(theta);
}

Eigen::VectorXd grad_loss(const Eigen::VectorXd& theta, const TrainingSet& set,
                          const MixedDiscretization& disc) {
  Eigen::VectorXd grad;
  MixedQoiLoss(disc, set).loss_and_grad(theta, grad);
  return grad;
}

namespace {

std::string theta_snapshot(const Eigen::VectorXd& theta) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (i) s += ", ";
    s += format_g17(theta[i]);
  }
  return s + "]";
}

}  // namespace

TrainingRun train(const TrainConfig& config, const LossModel& model, Eigen::VectorXd theta0) {
  using clock = std::chrono::steady_clock;
  if (theta0.size() != model.param_count()) throw ConfigError("train: theta0 has the wrong length");
  auto t0 = clock::now();
  auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  TrainingRun run;
  run.config = config;
  Eigen::VectorXd theta = std::move(theta0);
  Eigen::VectorXd grad(model.param_count());
  Eigen::VectorXd m1 = Eigen::VectorXd::Zero(model.param_count());
  Eigen::VectorXd m2 = Eigen::VectorXd::Zero(model.param_count());

  double j = model.loss_and_grad(theta, grad);
  if (!std::isfinite(j)) {
    throw NumericalError("non-finite loss at the initial parameters; theta = " + theta_snapshot(theta));
  }
  double best_loss = j;
  Eigen::VectorXd best_theta = theta;
  run.history.push_back({0, j, grad.norm(), elapsed_ms()});

  if (j <= config.tolerance) {
    run.stop = StopReason::tolerance_reached;
  } else {
    for (int it = 1; it <= config.max_iterations; ++it) {
      if (config.optimizer == OptimizerKind::adam) {
        m1 = config.beta1 * m1 + (1.0 - config.beta1) * grad;
        m2 = config.beta2 * m2.array().matrix() +
             (1.0 - config.beta2) * grad.array().square().matrix();
        double c1 = 1.0 - std::pow(config.beta1, it);
        double c2 = 1.0 - std::pow(config.beta2, it);
        theta.array() -= config.learning_rate * (m1.array() / c1) /
                         ((m2.array() / c2).sqrt() + config.adam_eps);
      } else {
        theta -= config.learning_rate * grad;
      }
      j = model.loss_and_grad(theta, grad);
      if (!std::isfinite(j)) {
        throw NumericalError("non-finite loss at iteration " + std::to_string(it) +
                             "; theta = " + theta_snapshot(theta));
      }
      double gnorm = grad.norm();
      run.history.push_back({it, j, gnorm, elapsed_ms()});
      run.iterations = it;
      if (j < best_loss) {
        best_loss = j;
        best_theta = theta;
      }
      if (j <= config.tolerance) {
        run.stop = StopReason::tolerance_reached;
        break;
      }
      if (gnorm < config.gradient_tolerance) {
        run.stop = StopReason::gradient_stalled;
        break;
      }
      if (it == config.max_iterations) run.stop = StopReason::max_iterations;
    }
  }
  run.theta = best_theta;
  run.final_loss = best_loss;
  return run;
}

std::vector<SweepRow> qoi_error_sweep(const std::function<Eigen::VectorXd(double)>& discrete_qoi,
                                      const std::function<Eigen::VectorXd(double)>& exact_qoi,
                                      const std::vector<double>& lambdas) {
  int nl = static_cast<int>(lambdas.size());
  std::vector<std::vector<SweepRow>> per_lambda(nl);
  parallel_for(nl, [&](int i) {
    double lam = lambdas[i];
    Eigen::VectorXd qd = discrete_qoi(lam);
    Eigen::VectorXd qe = exact_qoi(lam);
    for (int k = 0; k < qd.size(); ++k) {
      double abs_err = std::abs(qd[k] - qe[k]);
      per_lambda[i].push_back({lam, k, qd[k], qe[k], abs_err, abs_err / std::abs(qe[k])});
    }
  });
  std::vector<SweepRow> rows;
  for (auto& group : per_lambda) rows.insert(rows.end(), group.begin(), group.end());
  return rows;
}

std::vector<SweepRow> qoi_error_sweep(const MixedDiscretization& disc, const Eigen::VectorXd& theta,
                                      const std::vector<double>& lambdas,
                                      const std::function<Eigen::VectorXd(double)>& exact_qoi) {
  CondensedOperator op = disc.condense(theta);
  auto discrete = [&](double lam) { return op.online_qoi(disc.assemble_load(lam)); };
  return qoi_error_sweep(discrete, exact_qoi, lambdas);
}

std::vector<ScanRow> theta1_error_scan(double theta2, double lambda, double x0, double begin,
                                       double end, double step, int subintervals) {
  if (step <= 0 || end < begin) throw ConfigError("theta1 scan: bad sweep range");
  int count = static_cast<int>(std::floor((end - begin) / step + 0.5)) + 1;
  std::vector<ScanRow> rows(count);
  parallel_for(count, [&](int i) {
    double t1 = begin + i * step;
    WeightNet net = WeightNet::make(1, 1, GKind::affine_sigmoid);
    net.theta << t1, theta2;
    OptimalTestFunction1D phi(net, subintervals);
    rows[i] = {t1, optimal_test_rel_error(phi, lambda, x0)};
  });
  return rows;
}

std::vector<double> linspace(double a, double b, int count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = a;
    return out;
  }
  for (int i = 0; i < count; ++i) out[i] = a + (b - a) * (static_cast<double>(i) / (count - 1));
  return out;
}

}  // namespace goalfem
