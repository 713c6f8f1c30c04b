#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "goalfem/errors.hpp"
#include "goalfem/rng.hpp"
#include "goalfem/weightnet.hpp"

using namespace goalfem;

TEST_CASE("sigmoid: identity and stability") {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    double x = rng.uniform(-30.0, 30.0);
    CHECK(sigmoid(x) + sigmoid(-x) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK(sigmoid(0.0) == 0.5);
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(std::isfinite(sigmoid(-800.0)));
  CHECK(sigmoid(800.0) == doctest::Approx(1.0));
}

TEST_CASE("network value: zero parameters and one-neuron cases") {
  WeightNet net = WeightNet::make(1, 5, GKind::exp);
  double x = 0.37;
  CHECK(net.ann(&x) == 0.0);

  WeightNet one = WeightNet::make(1, 1, GKind::exp);
  one.theta << 0.0, 0.0, 1.0;  // (w, b, out)
  for (double xv : {-2.0, 0.0, 0.9}) {
    CHECK(one.ann(&xv) == doctest::Approx(0.5).epsilon(1e-15));
  }
  one.theta << 1.0, 0.0, 2.0;
  double zero = 0.0;
  CHECK(one.ann(&zero) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("weight: positivity and the zero-parameter baselines") {
  WeightNet expnet = WeightNet::make(1, 5, GKind::exp);
  WeightNet signet = WeightNet::make(1, 5, GKind::sigmoid);
  for (double x : {0.0, 0.25, 1.0}) {
    CHECK(expnet.weight(&x) == 1.0);  // Galerkin-recovery weight
    CHECK(signet.weight(&x) == 0.5);
  }

  WeightNet affine = WeightNet::make(1, 1, GKind::affine_sigmoid);
  REQUIRE(affine.param_count() == 2);
  affine.theta << 48.5, -9.0;
  double zero = 0.0;
  double expected = 1.0 / (1.0 + std::exp(9.0));
  CHECK(affine.weight(&zero) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(affine.weight(&zero) == doctest::Approx(1.2339e-4).epsilon(1e-4));
}

TEST_CASE("parameter counts follow the layout") {
  CHECK(WeightNet::make(2, 5, GKind::sigmoid).param_count() == 20);
  CHECK(WeightNet::make(1, 5, GKind::exp).param_count() == 15);
  CHECK(WeightNet::make(1, 6, GKind::sigmoid).param_count() == 18);
  CHECK(WeightNet::make(2, 1, GKind::affine_sigmoid).param_count() == 3);
}

TEST_CASE("weight gradient at zero parameters (exp transform)") {
  WeightNet net = WeightNet::make(1, 2, GKind::exp);
  double x = 0.4;
  Eigen::VectorXd grad;
  net.weight_grad(&x, grad);
  // per neuron: (input weight, bias, output weight)
  CHECK(grad[0] == 0.0);                                  // output weight is zero
  CHECK(grad[1] == 0.0);
  CHECK(grad[2] == doctest::Approx(0.5).epsilon(1e-15));  // sigma(0)
  CHECK(grad[5] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("weight gradient matches central finite differences") {
  Rng rng(21);
  const double h = 1e-6;
  for (GKind g : {GKind::exp, GKind::sigmoid, GKind::affine_sigmoid}) {
    for (int dim : {1, 2}) {
      WeightNet net = WeightNet::make(dim, 3, g);
      for (int trial = 0; trial < 5; ++trial) {
        for (int i = 0; i < net.param_count(); ++i) net.theta[i] = rng.uniform(-2.0, 2.0);
        double x[2] = {rng.uniform01(), rng.uniform01()};
        Eigen::VectorXd grad;
        net.weight_grad(x, grad);
        for (int i = 0; i < net.param_count(); ++i) {
          WeightNet plus = net, minus = net;
          plus.theta[i] += h;
          minus.theta[i] -= h;
          double fd = (plus.weight(x) - minus.weight(x)) / (2 * h);
          double scale = std::max({std::abs(fd), std::abs(grad[i]), 1e-8});
          CHECK(std::abs(grad[i] - fd) / scale < 1e-5);
        }
      }
    }
  }
}

TEST_CASE("weight stays positive and bounded on a dense sample for fixed parameters") {
  Rng rng(7);
  for (GKind g : {GKind::exp, GKind::sigmoid}) {
    WeightNet net = WeightNet::make(2, 5, g);
    for (int i = 0; i < net.param_count(); ++i) net.theta[i] = rng.uniform(-3.0, 3.0);
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i <= 50; ++i) {
      for (int j = 0; j <= 50; ++j) {
        double x[2] = {i / 50.0, j / 50.0};
        double w = net.weight(x);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      }
    }
    CHECK(lo > 0.0);
    CHECK(std::isfinite(hi));
  }
}

TEST_CASE("model file round-trips the parameters bit-exactly") {
  Rng rng(9);
  WeightNet net = WeightNet::make(2, 5, GKind::sigmoid);
  for (int i = 0; i < net.param_count(); ++i) net.theta[i] = rng.uniform(-10.0, 10.0);
  auto path = (std::filesystem::temp_directory_path() / "goalfem_model_test.json").string();
  save_weightnet_json(net, path);
  WeightNet back = load_weightnet_json(path);
  CHECK(back.input_dim == net.input_dim);
  CHECK(back.neuron_count == net.neuron_count);
  CHECK(back.g_kind == net.g_kind);
  REQUIRE(back.theta.size() == net.theta.size());
  for (int i = 0; i < net.param_count(); ++i) {
    CHECK(back.theta[i] == net.theta[i]);  // exact
  }
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_weightnet_json(path), ConfigError);
}
