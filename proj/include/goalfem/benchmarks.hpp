#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "goalfem/mesh.hpp"
#include "goalfem/problem.hpp"
#include "goalfem/training.hpp"
#include "goalfem/weightnet.hpp"

namespace goalfem {

struct MeshSpec {
  // 1D: element count; 2D: nx x ny grid with a split and a polynomial degree.
  int elements = 1;
  int nx = 1, ny = 1;
  SquareSplit split = SquareSplit::diagonal;
  int degree = 1;
};

struct BenchmarkVariant {
  std::string name;
  MeshSpec trial;
  MeshSpec test;
};

/// One of the four study configurations: problem, weight architecture,
/// training set and stopping tolerance, plus the trial/test size variants.
struct Benchmark {
  std::string id;
  FormKind form = FormKind::diffusion_1d;
  ProblemDefinition problem;
  int neuron_count = 5;
  GKind g_kind = GKind::exp;
  std::vector<double> training_lambdas;
  double tolerance = 9e-7;
  double learning_rate = 1e-2;
  int max_iterations = 100000;
  std::vector<BenchmarkVariant> variants;
};

/// The built-in catalog (compiled from data/benchmarks.json).
const std::vector<Benchmark>& benchmark_catalog();

std::vector<Benchmark> parse_benchmarks_json(const std::string& text);
Benchmark parse_benchmark_json(const std::string& text);

const Benchmark& find_benchmark(const std::string& id);

/// Pointwise exact solution; y is ignored for 1D benchmarks.
double exact_solution(const Benchmark& bench, double lambda, double x, double y = 0.0);

/// Exact QoI values (closed forms; the 2D average uses the separable
/// antiderivative of the sine product).
Eigen::VectorXd exact_qoi(const Benchmark& bench, double lambda);

/// Independent cross-check of the 2D average QoI by tensor quadrature of the
/// exact solution over the averaging window.
double exact_qoi_2d_by_quadrature(const Benchmark& bench, double lambda, int points_per_axis = 20);

TrainingSet make_training_set(const Benchmark& bench);

MixedDiscretization make_discretization(const Benchmark& bench, int variant_index);

}  // namespace goalfem
