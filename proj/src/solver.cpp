#include "goalfem/solver.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "goalfem/errors.hpp"
#include "goalfem/quadrature.hpp"

namespace goalfem {

static_assert(std::endian::native == std::endian::little,
              "condensed-operator files are little-endian");

CondensedOperator CondensedOperator::condense(const AssembledSystem& system) {
  CondensedOperator op;
  op.m_ = system.m;
  op.n_ = system.n;
  op.b_ = system.B;
  op.q_ = system.Q;

  op.a_llt_.compute(system.A);
  if (op.a_llt_.info() != Eigen::Success) {
    throw NumericalError("gram matrix A is not positive definite (broken weight or quadrature)");
  }
  op.a_inv_b_ = op.a_llt_.solve(system.B);
  op.bt_a_inv_ = op.a_inv_b_.transpose();
  op.schur_ = system.B.transpose() * op.a_inv_b_;
  op.schur_ = 0.5 * (op.schur_ + op.schur_.transpose()).eval();
  op.s_llt_.compute(op.schur_);
  if (op.s_llt_.info() != Eigen::Success) {
    throw NumericalError(
        "Schur complement B^T A^-1 B is not positive definite: "
        "the trial/test pairing violates the discrete inf-sup condition");
  }
  int k = system.qoi_count();
  op.qoi_map_.resize(k, op.m_);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd z = op.s_llt_.solve(system.Q.col(j));
    op.qoi_map_.row(j) = z.transpose() * op.bt_a_inv_;
  }
  return op;
}

Eigen::VectorXd CondensedOperator::solve_u(const Eigen::VectorXd& load) const {
  return s_llt_.solve(bt_a_inv_ * load);
}

MixedSolution CondensedOperator::solve_mixed(const Eigen::VectorXd& load) const {
  MixedSolution sol;
  sol.u = solve_u(load);
  sol.residual = a_llt_.solve(load - b_ * sol.u);
  return sol;
}

Eigen::VectorXd CondensedOperator::online_qoi(const Eigen::VectorXd& load) const {
  return qoi_map_ * load;
}

MixedSolution solve_mixed(const AssembledSystem& system, const Eigen::VectorXd& load) {
  return CondensedOperator::condense(system).solve_mixed(load);
}

namespace {

constexpr char kMagic[8] = {'G', 'F', 'E', 'M', 'C', 'N', 'D', '1'};
constexpr std::uint32_t kVersion = 1;

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

}  // namespace

void CondensedOperator::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out.write(kMagic, sizeof kMagic);
  std::uint32_t version = kVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  write_u64(out, static_cast<std::uint64_t>(m_));
  write_u64(out, static_cast<std::uint64_t>(n_));
  write_u64(out, static_cast<std::uint64_t>(qoi_count()));
  out.write(reinterpret_cast<const char*>(q_.data()), sizeof(double) * q_.size());
  // Row per QoI so each map streams contiguously.
  for (int j = 0; j < qoi_count(); ++j) {
    Eigen::VectorXd row = qoi_map_.row(j);
    out.write(reinterpret_cast<const char*>(row.data()), sizeof(double) * row.size());
  }
  if (!out) throw ConfigError("short write: " + path);
}

OnlineOperator OnlineOperator::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open condensed operator: " + path);
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw ConfigError("not a condensed-operator file: " + path);
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  if (version != kVersion) throw ConfigError("unsupported condensed-operator version");
  OnlineOperator op;
  op.m = static_cast<int>(read_u64(in));
  op.n = static_cast<int>(read_u64(in));
  int k = static_cast<int>(read_u64(in));
  if (op.m <= 0 || op.n <= 0 || k <= 0) throw ConfigError("corrupt condensed-operator header");
  op.qoi_vectors.resize(op.n, k);
  in.read(reinterpret_cast<char*>(op.qoi_vectors.data()), sizeof(double) * op.qoi_vectors.size());
  op.qoi_map.resize(k, op.m);
  for (int j = 0; j < k; ++j) {
    Eigen::VectorXd row(op.m);
    in.read(reinterpret_cast<char*>(row.data()), sizeof(double) * op.m);
    op.qoi_map.row(j) = row;
  }
  if (!in) throw ConfigError("truncated condensed-operator file: " + path);
  return op;
}

Eigen::VectorXd OnlineOperator::online_qoi(const Eigen::VectorXd& load) const {
  return qoi_map * load;
}

OptimalTestFunction1D::OptimalTestFunction1D(const WeightNet& net, int subintervals)
    : net_(net), subintervals_(subintervals) {
  if (net.input_dim != 1) throw ConfigError("optimal test function: 1D weights only");
  const QuadratureRule& rule = gauss_legendre_01(5);
  prefix_.resize(subintervals_ + 1);
  prefix_[0] = 0.0;
  double h = 1.0 / subintervals_;
  for (int s = 0; s < subintervals_; ++s) {
    double acc = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      double x = (s + rule.points(q, 0)) * h;
      acc += rule.weights[q] / net_.weight1(x);
    }
    prefix_[s + 1] = prefix_[s] + h * acc;
  }
}

double OptimalTestFunction1D::operator()(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return prefix_.back();
  double scaled = x * subintervals_;
  int s = std::min(static_cast<int>(scaled), subintervals_ - 1);
  double x0 = static_cast<double>(s) / subintervals_;
  double len = x - x0;
  double acc = 0.0;
  const QuadratureRule& rule = gauss_legendre_01(5);
  for (int q = 0; q < rule.size(); ++q) {
    acc += rule.weights[q] / net_.weight1(x0 + len * rule.points(q, 0));
  }
  return prefix_[s] + len * acc;
}

OptimalTestFunction1D optimal_test_function_1d(const WeightNet& net, int subintervals) {
  return OptimalTestFunction1D(net, subintervals);
}

double optimal_test_rel_error(const OptimalTestFunction1D& phi, double lambda, double x0) {
  double ratio = phi(lambda) / phi.at_one();
  if (x0 <= lambda) return std::abs(1.0 - ratio);
  return std::abs(1.0 - (x0 / lambda) * ratio);
}

}  // namespace goalfem
