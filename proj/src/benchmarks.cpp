#include "goalfem/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "goalfem/errors.hpp"
#include "goalfem/quadrature.hpp"
#include "goalfem/spaces.hpp"

#include "benchmark_data.hpp"

namespace goalfem {

namespace {

constexpr double kPi = std::numbers::pi;

double advection_exact(double lambda, double x) {
  double d = x - lambda;
  return d >= 0.0 ? 0.5 * d * d : 0.0;
}

double diffusion_2d_exact(double lambda, double x, double y) {
  return std::sin(kPi * x) * std::sin(lambda * kPi * x) * std::sin(kPi * y) *
         std::sin(lambda * kPi * y);
}

double diffusion_2d_forcing(double lambda, double x, double y) {
  double sx = std::sin(kPi * x) * std::sin(lambda * kPi * x);
  double sy = std::sin(kPi * y) * std::sin(lambda * kPi * y);
  double cx = std::cos(kPi * x) * std::cos(lambda * kPi * x);
  double cy = std::cos(kPi * y) * std::cos(lambda * kPi * y);
  return 2.0 * kPi * kPi * (1.0 + lambda * lambda) * sx * sy -
         2.0 * lambda * kPi * kPi * (cx * sy + sx * cy);
}

/// Antiderivative-based integral of sin(pi t) sin(lambda pi t) over [a,b].
double sine_product_integral(double a, double b, double lambda) {
  if (std::abs(1.0 - lambda) < 1e-12) {
    auto prim = [](double t) { return 0.5 * t - std::sin(2.0 * kPi * t) / (4.0 * kPi); };
    return prim(b) - prim(a);
  }
  auto prim = [lambda](double t) {
    return std::sin((1.0 - lambda) * kPi * t) / (2.0 * (1.0 - lambda) * kPi) -
           std::sin((1.0 + lambda) * kPi * t) / (2.0 * (1.0 + lambda) * kPi);
  };
  return prim(b) - prim(a);
}

}  // namespace

ProblemDefinition make_diffusion_1d_problem(std::vector<QoiSpec> qois) {
  ProblemDefinition p;
  p.form = FormKind::diffusion_1d;
  p.load.kind = LoadFamily::Kind::dirac_1d;
  p.qois = std::move(qois);
  p.exact_1d = [](double lambda, double x) { return std::min(x, lambda); };
  return p;
}

ProblemDefinition make_advection_1d_problem(std::vector<QoiSpec> qois) {
  ProblemDefinition p;
  p.form = FormKind::advection_1d;
  p.load.kind = LoadFamily::Kind::function_1d;
  p.load.f1 = [](double lambda, double x) { return x >= lambda ? x - lambda : 0.0; };
  p.load.kinks = [](double lambda) { return std::vector<double>{lambda}; };
  p.qois = std::move(qois);
  p.exact_1d = advection_exact;
  return p;
}

ProblemDefinition make_diffusion_2d_problem(std::vector<QoiSpec> qois) {
  ProblemDefinition p;
  p.form = FormKind::diffusion_2d;
  p.load.kind = LoadFamily::Kind::function_2d;
  p.load.f2 = diffusion_2d_forcing;
  p.qois = std::move(qois);
  p.exact_2d = diffusion_2d_exact;
  return p;
}

namespace {

FormKind form_from_string(const std::string& s) {
  if (s == "diffusion_1d") return FormKind::diffusion_1d;
  if (s == "advection_1d") return FormKind::advection_1d;
  if (s == "diffusion_2d") return FormKind::diffusion_2d;
  throw ConfigError("unknown form kind: " + s);
}

SquareSplit split_from_string(const std::string& s) {
  if (s == "diagonal") return SquareSplit::diagonal;
  if (s == "crisscross") return SquareSplit::crisscross;
  throw ConfigError("unknown mesh split: " + s);
}

MeshSpec parse_mesh_spec(const nlohmann::json& j, FormKind form) {
  MeshSpec spec;
  if (form_dim(form) == 1) {
    spec.elements = j.at("elements").get<int>();
    if (spec.elements < 1) throw ConfigError("mesh spec: need at least one element");
    return spec;
  }
  auto grid = j.at("grid").get<std::vector<int>>();
  if (grid.size() != 2 || grid[0] < 1 || grid[1] < 1) throw ConfigError("mesh spec: bad grid");
  spec.nx = grid[0];
  spec.ny = grid[1];
  spec.split = split_from_string(j.at("split").get<std::string>());
  spec.degree = j.value("degree", 1);
  return spec;
}

QoiSpec parse_qoi(const nlohmann::json& j, FormKind form) {
  QoiSpec q;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "point_value") {
    if (form_dim(form) != 1) throw ConfigError("point_value QoI belongs to 1D benchmarks");
    q.kind = QoiSpec::Kind::point_value;
    q.x0 = j.at("x0").get<double>();
  } else if (kind == "subdomain_average") {
    if (form_dim(form) != 2) throw ConfigError("subdomain_average QoI belongs to 2D benchmarks");
    q.kind = QoiSpec::Kind::subdomain_average;
    auto rect = j.at("rect").get<std::vector<double>>();
    if (rect.size() != 4) throw ConfigError("QoI rect must be [x_lo, y_lo, x_hi, y_hi]");
    q.rect_lo = {rect[0], rect[1]};
    q.rect_hi = {rect[2], rect[3]};
  } else {
    throw ConfigError("unknown QoI kind: " + kind);
  }
  return q;
}

Benchmark parse_benchmark(const nlohmann::json& j) {
  Benchmark b;
  b.id = j.at("id").get<std::string>();
  b.form = form_from_string(j.at("form").get<std::string>());

  std::vector<QoiSpec> qois;
  for (const auto& jq : j.at("qois")) qois.push_back(parse_qoi(jq, b.form));
  switch (b.form) {
    case FormKind::diffusion_1d: b.problem = make_diffusion_1d_problem(qois); break;
    case FormKind::advection_1d: b.problem = make_advection_1d_problem(qois); break;
    case FormKind::diffusion_2d: b.problem = make_diffusion_2d_problem(qois); break;
  }

  const auto& net = j.at("net");
  b.neuron_count = net.at("neurons").get<int>();
  b.g_kind = g_kind_from_string(net.at("g").get<std::string>());

  const auto& rule = j.at("lambda_rule");
  double scale = rule.at("scale").get<double>();
  double offset = rule.at("offset").get<double>();
  double den = rule.at("den").get<double>();
  int count = rule.at("count").get<int>();
  for (int i = 1; i <= count; ++i) b.training_lambdas.push_back((scale * i + offset) / den);

  b.tolerance = j.at("tolerance").get<double>();
  b.learning_rate = j.value("learning_rate", 1e-2);
  b.max_iterations = j.value("max_iterations", 100000);

  for (const auto& jv : j.at("variants")) {
    BenchmarkVariant v;
    v.name = jv.at("name").get<std::string>();
    v.trial = parse_mesh_spec(jv.at("trial"), b.form);
    v.test = parse_mesh_spec(jv.at("test"), b.form);
    b.variants.push_back(std::move(v));
  }
  if (b.variants.empty()) throw ConfigError("benchmark " + b.id + " has no variants");
  return b;
}

}  // namespace

std::vector<Benchmark> parse_benchmarks_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed benchmark JSON: ") + e.what());
  }
  std::vector<Benchmark> out;
  for (const auto& jb : j.at("benchmarks")) out.push_back(parse_benchmark(jb));
  return out;
}

Benchmark parse_benchmark_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed benchmark JSON: ") + e.what());
  }
  return parse_benchmark(j);
}

const std::vector<Benchmark>& benchmark_catalog() {
  static const std::vector<Benchmark> catalog = parse_benchmarks_json(detail::kBenchmarksJson);
  return catalog;
}

const Benchmark& find_benchmark(const std::string& id) {
  for (const auto& b : benchmark_catalog()) {
    if (b.id == id) return b;
  }
  throw ConfigError("unknown benchmark: " + id);
}

double exact_solution(const Benchmark& bench, double lambda, double x, double y) {
  if (bench.problem.dim() == 1) return bench.problem.exact_1d(lambda, x);
  return bench.problem.exact_2d(lambda, x, y);
}

Eigen::VectorXd exact_qoi(const Benchmark& bench, double lambda) {
  Eigen::VectorXd out(bench.problem.qois.size());
  for (std::size_t k = 0; k < bench.problem.qois.size(); ++k) {
    const QoiSpec& q = bench.problem.qois[k];
    if (q.kind == QoiSpec::Kind::point_value) {
      out[k] = bench.problem.exact_1d(lambda, q.x0);
    } else {
      double ix = sine_product_integral(q.rect_lo[0], q.rect_hi[0], lambda);
      double iy = sine_product_integral(q.rect_lo[1], q.rect_hi[1], lambda);
      double area = (q.rect_hi[0] - q.rect_lo[0]) * (q.rect_hi[1] - q.rect_lo[1]);
      out[k] = ix * iy / area;
    }
  }
  return out;
}

double exact_qoi_2d_by_quadrature(const Benchmark& bench, double lambda, int points_per_axis) {
  const QoiSpec& q = bench.problem.qois.at(0);
  if (q.kind != QoiSpec::Kind::subdomain_average) {
    throw ConfigError("quadrature QoI oracle applies to subdomain averages");
  }
  QuadratureRule rule = gauss_legendre_01(points_per_axis);
  double acc = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    for (int j = 0; j < rule.size(); ++j) {
      double x = q.rect_lo[0] + (q.rect_hi[0] - q.rect_lo[0]) * rule.points(i, 0);
      double y = q.rect_lo[1] + (q.rect_hi[1] - q.rect_lo[1]) * rule.points(j, 0);
      acc += rule.weights[i] * rule.weights[j] * bench.problem.exact_2d(lambda, x, y);
    }
  }
  return acc;  // rule weights sum to 1 per axis, so this is already the average
}

TrainingSet make_training_set(const Benchmark& bench) {
  TrainingSet set;
  for (double lam : bench.training_lambdas) set.push_back({lam, exact_qoi(bench, lam)});
  return set;
}

MixedDiscretization make_discretization(const Benchmark& bench, int variant_index) {
  if (variant_index < 0 || variant_index >= static_cast<int>(bench.variants.size())) {
    throw ConfigError("benchmark " + bench.id + ": variant index out of range");
  }
  const BenchmarkVariant& v = bench.variants[variant_index];
  if (bench.problem.dim() == 1) {
    BoundaryCondition test_bc = bench.form == FormKind::diffusion_1d
                                    ? BoundaryCondition::left_dirichlet
                                    : BoundaryCondition::none;
    Space1D trial(build_interval_mesh(v.trial.elements, 0.0, 1.0), 1,
                  BoundaryCondition::left_dirichlet);
    Space1D test(build_interval_mesh(v.test.elements, 0.0, 1.0), 1, test_bc);
    return MixedDiscretization(std::move(trial), std::move(test), bench.problem,
                               bench.neuron_count, bench.g_kind);
  }
  Space2D trial(build_rect_mesh(v.trial.nx, v.trial.ny, v.trial.split), v.trial.degree,
                BoundaryCondition::full_dirichlet);
  Space2D test(build_rect_mesh(v.test.nx, v.test.ny, v.test.split), v.test.degree,
               BoundaryCondition::full_dirichlet);
  return MixedDiscretization(std::move(trial), std::move(test), bench.problem, bench.neuron_count,
                             bench.g_kind);
}

}  // namespace goalfem
