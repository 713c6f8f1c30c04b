#include "goalfem/weightnet.hpp"

#include <fstream>

#include <json.hpp>

#include "goalfem/errors.hpp"

namespace goalfem {

std::string to_string(GKind g) {
  switch (g) {
    case GKind::exp: return "exp";
    case GKind::sigmoid: return "sigmoid";
    case GKind::affine_sigmoid: return "affine_sigmoid";
  }
  return "?";
}

GKind g_kind_from_string(const std::string& s) {
  if (s == "exp") return GKind::exp;
  if (s == "sigmoid") return GKind::sigmoid;
  if (s == "affine_sigmoid") return GKind::affine_sigmoid;
  throw ConfigError("unknown weight transform: " + s);
}

WeightNet WeightNet::make(int input_dim, int neuron_count, GKind g_kind) {
  if (input_dim != 1 && input_dim != 2) throw ConfigError("WeightNet: input_dim must be 1 or 2");
  if (neuron_count < 1) throw ConfigError("WeightNet: need at least one neuron");
  WeightNet net;
  net.input_dim = input_dim;
  net.neuron_count = (g_kind == GKind::affine_sigmoid) ? 1 : neuron_count;
  net.g_kind = g_kind;
  net.theta = Eigen::VectorXd::Zero(net.param_count());
  return net;
}

double WeightNet::ann(const double* x) const {
  const int d = input_dim;
  if (g_kind == GKind::affine_sigmoid) {
    double z = theta[d];
    for (int k = 0; k < d; ++k) z += theta[k] * x[k];
    return z;
  }
  double sum = 0.0;
  for (int j = 0; j < neuron_count; ++j) {
    const double* p = theta.data() + j * (d + 2);
    double z = p[d];
    for (int k = 0; k < d; ++k) z += p[k] * x[k];
    sum += p[d + 1] * sigmoid(z);
  }
  return sum;
}

double WeightNet::weight(const double* x) const {
  double a = ann(x);
  switch (g_kind) {
    case GKind::exp: return std::exp(a);
    case GKind::sigmoid:
    case GKind::affine_sigmoid: return sigmoid(a);
  }
  return 0.0;
}

void WeightNet::ann_grad(const double* x, Eigen::VectorXd& out) const {
  const int d = input_dim;
  out.resize(param_count());
  if (g_kind == GKind::affine_sigmoid) {
    for (int k = 0; k < d; ++k) out[k] = x[k];
    out[d] = 1.0;
    return;
  }
  for (int j = 0; j < neuron_count; ++j) {
    const double* p = theta.data() + j * (d + 2);
    double z = p[d];
    for (int k = 0; k < d; ++k) z += p[k] * x[k];
    double s = sigmoid(z);
    double ds = s * (1.0 - s);
    double* g = out.data() + j * (d + 2);
    for (int k = 0; k < d; ++k) g[k] = p[d + 1] * ds * x[k];
    g[d] = p[d + 1] * ds;
    g[d + 1] = s;
  }
}

double WeightNet::weight_grad(const double* x, Eigen::VectorXd& out) const {
  ann_grad(x, out);
  double a = ann(x);
  double w, chain;
  if (g_kind == GKind::exp) {
    w = std::exp(a);
    chain = w;
  } else {
    w = sigmoid(a);
    chain = w * (1.0 - w);
  }
  out *= chain;
  return w;
}

void save_weightnet_json(const WeightNet& net, const std::string& path) {
  nlohmann::json j;
  j["input_dim"] = net.input_dim;
  j["neuron_count"] = net.neuron_count;
  j["g_kind"] = to_string(net.g_kind);
  j["theta"] = std::vector<double>(net.theta.data(), net.theta.data() + net.theta.size());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

WeightNet load_weightnet_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt model file " + path + ": " + e.what());
  }
  WeightNet net = WeightNet::make(j.at("input_dim").get<int>(), j.at("neuron_count").get<int>(),
                                  g_kind_from_string(j.at("g_kind").get<std::string>()));
  auto values = j.at("theta").get<std::vector<double>>();
  if (static_cast<int>(values.size()) != net.param_count()) {
    throw ConfigError("model file " + path + ": theta length does not match architecture");
  }
  net.theta = Eigen::Map<const Eigen::VectorXd>(values.data(), values.size());
  return net;
}

}  // namespace goalfem
