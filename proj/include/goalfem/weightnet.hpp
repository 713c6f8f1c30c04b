#pragma once

#include <cmath>
#include <string>

#include <Eigen/Core>

namespace goalfem {

/// Output transform applied to the raw network value; every choice keeps
/// the weight strictly positive.
enum class GKind { exp, sigmoid, affine_sigmoid };

std::string to_string(GKind g);
GKind g_kind_from_string(const std::string& s);

/// Overflow-free logistic sigmoid.
inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

/// Single-hidden-layer network defining the weight function
/// omega(x) = g(sum_j out_j * sigmoid(w_j . x + b_j)). Parameters are stored
/// flat, per neuron: input weights, bias, output weight. The affine_sigmoid
/// kind is the degenerate two-parameter family omega(x) = sigmoid(w.x + b).
struct WeightNet {
  int input_dim = 1;
  int neuron_count = 1;
  GKind g_kind = GKind::exp;
  Eigen::VectorXd theta;

  static WeightNet make(int input_dim, int neuron_count, GKind g_kind);

  int param_count() const {
    if (g_kind == GKind::affine_sigmoid) return input_dim + 1;
    return neuron_count * (input_dim + 2);
  }

  /// Raw network value at x (x has input_dim entries).
  double ann(const double* x) const;
  /// omega(x) = g(ann(x)) > 0.
  double weight(const double* x) const;
  /// d ann / d theta at x.
  void ann_grad(const double* x, Eigen::VectorXd& out) const;
  /// d omega / d theta at x (chain rule through g); returns omega(x).
  double weight_grad(const double* x, Eigen::VectorXd& out) const;

  double ann1(double x) const { return ann(&x); }
  double weight1(double x) const { return weight(&x); }
};

void save_weightnet_json(const WeightNet& net, const std::string& path);
WeightNet load_weightnet_json(const std::string& path);

}  // namespace goalfem
