// Python bindings for the core operations: meshes, spaces, weights,
// assembly, the mixed solver, and training.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "goalfem/artifacts.hpp"
#include "goalfem/assembly.hpp"
#include "goalfem/benchmarks.hpp"
#include "goalfem/errors.hpp"
#include "goalfem/mesh.hpp"
#include "goalfem/problem.hpp"
#include "goalfem/quadrature.hpp"
#include "goalfem/rng.hpp"
#include "goalfem/solver.hpp"
#include "goalfem/spaces.hpp"
#include "goalfem/training.hpp"
#include "goalfem/weightnet.hpp"

namespace py = pybind11;
using namespace goalfem;

namespace {

double net_eval_1d(const WeightNet& net, double x, bool raw) {
  if (net.input_dim != 1) throw ConfigError("this weight takes 2D points");
  return raw ? net.ann(&x) : net.weight(&x);
}

double net_eval_2d(const WeightNet& net, double x, double y, bool raw) {
  if (net.input_dim != 2) throw ConfigError("this weight takes 1D points");
  double p[2] = {x, y};
  return raw ? net.ann(p) : net.weight(p);
}

}  // namespace

PYBIND11_MODULE(_goalfem, m) {
  m.doc() = "Goal-oriented finite elements with trained test-space weights";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  // ----- meshes
  py::enum_<SquareSplit>(m, "SquareSplit")
      .value("diagonal", SquareSplit::diagonal)
      .value("crisscross", SquareSplit::crisscross);

  py::class_<Mesh1D>(m, "Mesh1D")
      .def_readonly("nodes", &Mesh1D::nodes)
      .def("element_count", &Mesh1D::element_count);
  py::class_<Mesh2D>(m, "Mesh2D")
      .def_readonly("triangles", &Mesh2D::triangles)
      .def_readonly("boundary_vertices", &Mesh2D::boundary_vertices)
      .def("vertex", [](const Mesh2D& mesh, int v) { return mesh.vertices.at(v); })
      .def("vertex_count", [](const Mesh2D& mesh) { return mesh.vertices.size(); })
      .def("triangle_count", &Mesh2D::triangle_count)
      .def("total_area", &Mesh2D::total_area);

  m.def("build_interval_mesh", &build_interval_mesh, py::arg("n"), py::arg("a") = 0.0,
        py::arg("b") = 1.0);
  m.def("build_square_mesh", &build_square_mesh, py::arg("n"), py::arg("split"));
  m.def("build_rect_mesh", &build_rect_mesh, py::arg("nx"), py::arg("ny"), py::arg("split"));

  // ----- spaces and quadrature
  py::enum_<BoundaryCondition>(m, "BoundaryCondition")
      .value("none", BoundaryCondition::none)
      .value("left_dirichlet", BoundaryCondition::left_dirichlet)
      .value("full_dirichlet", BoundaryCondition::full_dirichlet);

  py::class_<Space1D>(m, "Space1D")
      .def(py::init<Mesh1D, int, BoundaryCondition>(), py::arg("mesh"), py::arg("degree"),
           py::arg("bc"))
      .def("dof_count", &Space1D::dof_count)
      .def("dof_node", &Space1D::dof_node)
      .def("value", &Space1D::value);
  py::class_<Space2D>(m, "Space2D")
      .def(py::init<Mesh2D, int, BoundaryCondition>(), py::arg("mesh"), py::arg("degree"),
           py::arg("bc"))
      .def("dof_count", &Space2D::dof_count)
      .def("dof_point", &Space2D::dof_point)
      .def("value", &Space2D::value);

  py::enum_<ElementKind>(m, "ElementKind")
      .value("interval", ElementKind::interval)
      .value("triangle", ElementKind::triangle);
  py::class_<QuadratureRule>(m, "QuadratureRule")
      .def_readonly("points", &QuadratureRule::points)
      .def_readonly("weights", &QuadratureRule::weights)
      .def_readonly("order", &QuadratureRule::order);
  m.def("quadrature_rule", &quadrature_rule, py::arg("kind"), py::arg("order"));

  // ----- weight networks
  py::enum_<GKind>(m, "GKind")
      .value("exp", GKind::exp)
      .value("sigmoid", GKind::sigmoid)
      .value("affine_sigmoid", GKind::affine_sigmoid);

  py::class_<WeightNet>(m, "WeightNet")
      .def_static("make", &WeightNet::make, py::arg("input_dim"), py::arg("neuron_count"),
                  py::arg("g_kind"))
      .def_readonly("input_dim", &WeightNet::input_dim)
      .def_readonly("neuron_count", &WeightNet::neuron_count)
      .def_readonly("g_kind", &WeightNet::g_kind)
      .def_readwrite("theta", &WeightNet::theta)
      .def("param_count", &WeightNet::param_count)
      .def("ann", [](const WeightNet& net, double x) { return net_eval_1d(net, x, true); })
      .def("ann", [](const WeightNet& net, double x, double y) { return net_eval_2d(net, x, y, true); })
      .def("weight", [](const WeightNet& net, double x) { return net_eval_1d(net, x, false); })
      .def("weight",
           [](const WeightNet& net, double x, double y) { return net_eval_2d(net, x, y, false); })
      .def("grad_theta", [](const WeightNet& net, double x) {
        Eigen::VectorXd g;
        net.weight_grad(&x, g);
        return g;
      })
      .def("grad_theta", [](const WeightNet& net, double x, double y) {
        double p[2] = {x, y};
        Eigen::VectorXd g;
        net.weight_grad(p, g);
        return g;
      });
  m.def("save_weightnet_json", &save_weightnet_json);
  m.def("load_weightnet_json", &load_weightnet_json);
  m.def("sigmoid", &sigmoid);
  m.def("random_initial_theta", &random_initial_theta, py::arg("count"), py::arg("seed"));

  // ----- problems and assembly
  py::enum_<FormKind>(m, "FormKind")
      .value("diffusion_1d", FormKind::diffusion_1d)
      .value("advection_1d", FormKind::advection_1d)
      .value("diffusion_2d", FormKind::diffusion_2d);

  py::class_<QoiSpec>(m, "QoiSpec")
      .def_static("point_value",
                  [](double x0) {
                    QoiSpec q;
                    q.kind = QoiSpec::Kind::point_value;
                    q.x0 = x0;
                    return q;
                  })
      .def_static("subdomain_average", [](double x_lo, double y_lo, double x_hi, double y_hi) {
        QoiSpec q;
        q.kind = QoiSpec::Kind::subdomain_average;
        q.rect_lo = {x_lo, y_lo};
        q.rect_hi = {x_hi, y_hi};
        return q;
      });

  py::class_<ProblemDefinition>(m, "ProblemDefinition")
      .def_property_readonly("form", [](const ProblemDefinition& p) { return p.form; })
      .def("dim", &ProblemDefinition::dim)
      .def("exact", [](const ProblemDefinition& p, double lam, double x) {
        return p.exact_1d(lam, x);
      })
      .def("exact", [](const ProblemDefinition& p, double lam, double x, double y) {
        return p.exact_2d(lam, x, y);
      });
  m.def("make_diffusion_1d_problem", &make_diffusion_1d_problem);
  m.def("make_advection_1d_problem", &make_advection_1d_problem);
  m.def("make_diffusion_2d_problem", &make_diffusion_2d_problem);

  py::class_<AssembledSystem>(m, "AssembledSystem")
      .def_readonly("A", &AssembledSystem::A)
      .def_readonly("B", &AssembledSystem::B)
      .def_readonly("Q", &AssembledSystem::Q)
      .def_readonly("m", &AssembledSystem::m)
      .def_readonly("n", &AssembledSystem::n);

  m.def("assemble_gram",
        py::overload_cast<const Space1D&, const WeightNet&, const ProblemDefinition&>(&assemble_gram));
  m.def("assemble_gram",
        py::overload_cast<const Space2D&, const WeightNet&, const ProblemDefinition&>(&assemble_gram));
  m.def("assemble_bilinear", py::overload_cast<const Space1D&, const Space1D&, const ProblemDefinition&>(
                                 &assemble_bilinear));
  m.def("assemble_bilinear", py::overload_cast<const Space2D&, const Space2D&, const ProblemDefinition&>(
                                 &assemble_bilinear));
  m.def("assemble_load",
        py::overload_cast<const Space1D&, const ProblemDefinition&, double>(&assemble_load));
  m.def("assemble_load",
        py::overload_cast<const Space2D&, const ProblemDefinition&, double>(&assemble_load));
  m.def("assemble_qoi", py::overload_cast<const Space1D&, const QoiSpec&>(&assemble_qoi));
  m.def("assemble_qoi", py::overload_cast<const Space2D&, const QoiSpec&>(&assemble_qoi));
  m.def("assemble_system", py::overload_cast<const Space1D&, const Space1D&, const WeightNet&,
                                             const ProblemDefinition&>(&assemble_system));
  m.def("assemble_system", py::overload_cast<const Space2D&, const Space2D&, const WeightNet&,
                                             const ProblemDefinition&>(&assemble_system));

  // ----- solver
  py::class_<MixedSolution>(m, "MixedSolution")
      .def_readonly("residual", &MixedSolution::residual)
      .def_readonly("u", &MixedSolution::u);
  py::class_<CondensedOperator>(m, "CondensedOperator")
      .def_static("condense", &CondensedOperator::condense)
      .def("solve_u", &CondensedOperator::solve_u)
      .def("solve_mixed", &CondensedOperator::solve_mixed)
      .def("online_qoi", &CondensedOperator::online_qoi)
      .def("qoi_map", &CondensedOperator::qoi_map)
      .def("save", &CondensedOperator::save)
      .def_property_readonly("m", &CondensedOperator::m)
      .def_property_readonly("n", &CondensedOperator::n);
  py::class_<OnlineOperator>(m, "OnlineOperator")
      .def_static("load", &OnlineOperator::load)
      .def("online_qoi", &OnlineOperator::online_qoi)
      .def_readonly("m", &OnlineOperator::m)
      .def_readonly("n", &OnlineOperator::n);
  m.def("solve_mixed", py::overload_cast<const AssembledSystem&, const Eigen::VectorXd&>(&solve_mixed));

  py::class_<OptimalTestFunction1D>(m, "OptimalTestFunction1D")
      .def(py::init<const WeightNet&, int>(), py::arg("net"), py::arg("subintervals") = 2048)
      .def("__call__", &OptimalTestFunction1D::operator())
      .def("at_one", &OptimalTestFunction1D::at_one);
  m.def("optimal_test_rel_error", &optimal_test_rel_error);

  // ----- training
  py::enum_<OptimizerKind>(m, "OptimizerKind")
      .value("adam", OptimizerKind::adam)
      .value("gradient_descent", OptimizerKind::gradient_descent);
  py::enum_<StopReason>(m, "StopReason")
      .value("tolerance_reached", StopReason::tolerance_reached)
      .value("max_iterations", StopReason::max_iterations)
      .value("gradient_stalled", StopReason::gradient_stalled);

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("optimizer", &TrainConfig::optimizer)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("max_iterations", &TrainConfig::max_iterations)
      .def_readwrite("tolerance", &TrainConfig::tolerance)
      .def_readwrite("gradient_tolerance", &TrainConfig::gradient_tolerance)
      .def_readwrite("seed", &TrainConfig::seed);

  py::class_<TrainingSample>(m, "TrainingSample")
      .def(py::init([](double lambda, const Eigen::VectorXd& ref) {
             return TrainingSample{lambda, ref};
           }),
           py::arg("lambda"), py::arg("qoi_ref"))
      .def_readonly("lambda_", &TrainingSample::lambda)
      .def_readonly("qoi_ref", &TrainingSample::qoi_ref);

  py::class_<TrainingRecord>(m, "TrainingRecord")
      .def_readonly("iteration", &TrainingRecord::iteration)
      .def_readonly("loss", &TrainingRecord::loss)
      .def_readonly("grad_norm", &TrainingRecord::grad_norm);
  py::class_<TrainingRun>(m, "TrainingRun")
      .def_readonly("theta", &TrainingRun::theta)
      .def_readonly("final_loss", &TrainingRun::final_loss)
      .def_readonly("stop", &TrainingRun::stop)
      .def_readonly("iterations", &TrainingRun::iterations)
      .def_readonly("history", &TrainingRun::history);

  py::class_<MixedDiscretization>(m, "MixedDiscretization")
      .def(py::init<Space1D, Space1D, ProblemDefinition, int, GKind>(), py::arg("trial"),
           py::arg("test"), py::arg("problem"), py::arg("neuron_count"), py::arg("g_kind"))
      .def(py::init<Space2D, Space2D, ProblemDefinition, int, GKind>(), py::arg("trial"),
           py::arg("test"), py::arg("problem"), py::arg("neuron_count"), py::arg("g_kind"))
      .def("param_count", &MixedDiscretization::param_count)
      .def("trial_dim", &MixedDiscretization::trial_dim)
      .def("test_dim", &MixedDiscretization::test_dim)
      .def("qoi_count", &MixedDiscretization::qoi_count)
      .def("assemble_load", &MixedDiscretization::assemble_load)
      .def("assemble_gram", &MixedDiscretization::assemble_gram)
      .def("condense", &MixedDiscretization::condense)
      .def("make_net", &MixedDiscretization::make_net);

  m.def("loss", &loss, py::arg("theta"), py::arg("training_set"), py::arg("discretization"));
  m.def("grad_loss", &grad_loss, py::arg("theta"), py::arg("training_set"),
        py::arg("discretization"));
  m.def(
      "train",
      [](const TrainConfig& config, const MixedDiscretization& disc, const TrainingSet& set,
         const Eigen::VectorXd& theta0) { return train(config, MixedQoiLoss(disc, set), theta0); },
      py::arg("config"), py::arg("discretization"), py::arg("training_set"), py::arg("theta0"),
      py::call_guard<py::gil_scoped_release>());

  py::class_<SweepRow>(m, "SweepRow")
      .def_readonly("lambda_", &SweepRow::lambda)
      .def_readonly("qoi_index", &SweepRow::qoi_index)
      .def_readonly("qoi_discrete", &SweepRow::qoi_discrete)
      .def_readonly("qoi_exact", &SweepRow::qoi_exact)
      .def_readonly("abs_error", &SweepRow::abs_error)
      .def_readonly("rel_error", &SweepRow::rel_error);
  m.def(
      "qoi_error_sweep",
      [](const MixedDiscretization& disc, const Eigen::VectorXd& theta,
         const std::vector<double>& lambdas, const std::function<Eigen::VectorXd(double)>& exact) {
        // the exact-QoI callback may be a Python function: workers acquire
        // the GIL per call, so it must not be held here
        py::gil_scoped_release release;
        return qoi_error_sweep(disc, theta, lambdas, exact);
      },
      py::arg("discretization"), py::arg("theta"), py::arg("lambdas"), py::arg("exact_qoi"));

  py::class_<ScanRow>(m, "ScanRow")
      .def_readonly("theta1", &ScanRow::theta1)
      .def_readonly("rel_error", &ScanRow::rel_error);
  m.def("theta1_error_scan", &theta1_error_scan, py::arg("theta2"), py::arg("lambda"), py::arg("x0"),
        py::arg("begin"), py::arg("end"), py::arg("step"), py::arg("subintervals") = 1024,
        py::call_guard<py::gil_scoped_release>());
  m.def("linspace", &linspace);

  // ----- benchmarks
  py::class_<BenchmarkVariant>(m, "BenchmarkVariant")
      .def_readonly("name", &BenchmarkVariant::name);
  py::class_<Benchmark>(m, "Benchmark")
      .def_readonly("id", &Benchmark::id)
      .def_readonly("form", &Benchmark::form)
      .def_readonly("neuron_count", &Benchmark::neuron_count)
      .def_readonly("g_kind", &Benchmark::g_kind)
      .def_readonly("training_lambdas", &Benchmark::training_lambdas)
      .def_readonly("tolerance", &Benchmark::tolerance)
      .def_readonly("variants", &Benchmark::variants)
      .def_property_readonly("problem", [](const Benchmark& b) { return b.problem; });
  m.def("benchmark_catalog", [] { return benchmark_catalog(); });
  m.def("find_benchmark", [](const std::string& id) { return find_benchmark(id); });
  m.def("exact_solution", &exact_solution, py::arg("benchmark"), py::arg("lambda"), py::arg("x"),
        py::arg("y") = 0.0);
  m.def("exact_qoi", &exact_qoi);
  m.def("make_training_set", &make_training_set);
  m.def("make_discretization", &make_discretization);
}
