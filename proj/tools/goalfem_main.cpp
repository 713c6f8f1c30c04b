// goalfem command line: offline training, online QoI evaluation, and CSV
// tables reproducing the study figures.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "goalfem/artifacts.hpp"
#include "goalfem/benchmarks.hpp"
#include "goalfem/csv.hpp"
#include "goalfem/errors.hpp"
#include "goalfem/parallel.hpp"
#include "goalfem/rng.hpp"
#include "goalfem/solver.hpp"
#include "goalfem/training.hpp"

namespace fs = std::filesystem;
using namespace goalfem;

namespace {

Benchmark resolve_benchmark(const std::string& id_or_path) {
  if (id_or_path.size() > 5 && id_or_path.substr(id_or_path.size() - 5) == ".json" &&
      fs::exists(id_or_path)) {
    std::ifstream in(id_or_path, std::ios::binary);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    return parse_benchmark_json(text);
  }
  return find_benchmark(id_or_path);
}

std::vector<double> parse_sweep(const std::string& spec) {
  double a = 0, b = 0;
  int steps = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &steps) != 3 || steps < 1) {
    throw ConfigError("--sweep expects begin:end:steps, e.g. 0:1:101");
  }
  return linspace(a, b, steps);
}

struct EvalTarget {
  Benchmark bench;
  int variant = 0;
  std::optional<OnlineOperator> online;         // from a condensed artifact
  std::optional<Eigen::VectorXd> model_theta;   // from a model file
};

EvalTarget resolve_eval_target(const std::string& artifact, const std::string& benchmark_flag,
                               int variant_flag) {
  EvalTarget target;
  if (!fs::exists(artifact)) throw ConfigError("artifact not found: " + artifact);

  std::string ext = fs::path(artifact).extension().string();
  if (ext == ".bin") {
    if (benchmark_flag.empty()) {
      throw ConfigError("a raw condensed file needs --benchmark (and --variant) for the loads");
    }
    target.bench = resolve_benchmark(benchmark_flag);
    target.variant = variant_flag;
    target.online = OnlineOperator::load(artifact);
    return target;
  }
  if (ext != ".json") throw ConfigError("unrecognized artifact type: " + artifact);

  std::ifstream in(artifact, std::ios::binary);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt artifact " + artifact + ": " + e.what());
  }
  if (j.contains("artifacts")) {  // run manifest
    RunManifest manifest = RunManifest::from_json_file(artifact);
    target.bench = find_benchmark(manifest.benchmark_id);
    target.variant = manifest.variant;
    target.online = OnlineOperator::load(manifest.artifacts.at("condensed"));
    return target;
  }
  if (j.contains("theta")) {  // model file: assemble offline, then evaluate
    if (benchmark_flag.empty()) {
      throw ConfigError("a model file needs --benchmark (and --variant) to rebuild the system");
    }
    WeightNet net = load_weightnet_json(artifact);
    target.bench = resolve_benchmark(benchmark_flag);
    target.variant = variant_flag;
    target.model_theta = net.theta;
    return target;
  }
  throw ConfigError("artifact is neither a manifest nor a model file: " + artifact);
}

int cmd_train(const std::string& id_or_path, int variant, TrainOverrides over, int restarts,
              const std::string& out_dir) {
  Benchmark bench = resolve_benchmark(id_or_path);
  TrainOutputs out = restarts > 0 ? train_with_restarts(bench, variant, over, out_dir, restarts)
                                  : run_training(bench, variant, over, out_dir);
  std::cout << "trained " << bench.id << " (" << bench.variants[variant].name << ")\n"
            << "  stop: " << to_string(out.run.stop) << " after " << out.run.iterations
            << " iterations, loss " << format_g17(out.run.final_loss) << "\n"
            << "  manifest: " << out.manifest_path << "\n";
  if (out.run.stop != StopReason::tolerance_reached) {
    std::cerr << "warning: tolerance not reached\n";
  }
  return 0;
}

int cmd_eval(const std::string& artifact, const std::string& benchmark_flag, int variant_flag,
             double lambda, bool have_lambda, const std::string& sweep, const std::string& out) {
  EvalTarget target = resolve_eval_target(artifact, benchmark_flag, variant_flag);
  MixedDiscretization disc = make_discretization(target.bench, target.variant);

  std::optional<CondensedOperator> condensed;
  if (target.model_theta) condensed = disc.condense(*target.model_theta);
  auto discrete = [&](double lam) {
    Eigen::VectorXd L = disc.assemble_load(lam);
    return condensed ? condensed->online_qoi(L) : target.online->online_qoi(L);
  };

  if (have_lambda) {
    if (!target.bench.problem.lambda_in_domain(lambda)) {
      throw ConfigError("lambda outside the parameter domain");
    }
    Eigen::VectorXd q = discrete(lambda);
    for (int k = 0; k < q.size(); ++k) {
      std::cout << "qoi[" << k << "] = " << format_g17(q[k]) << "\n";
    }
    return 0;
  }

  std::vector<double> grid = parse_sweep(sweep);
  for (double lam : grid) {
    if (!target.bench.problem.lambda_in_domain(lam)) {
      throw ConfigError("sweep leaves the parameter domain");
    }
  }
  auto exact = [&](double lam) { return exact_qoi(target.bench, lam); };
  std::vector<SweepRow> rows = qoi_error_sweep(discrete, exact, grid);
  if (out.empty()) {
    std::cout << "lambda,qoi_index,qoi_discrete,qoi_exact,abs_error,rel_error\r\n";
    for (const auto& r : rows) {
      std::cout << format_g17(r.lambda) << ',' << r.qoi_index << ',' << format_g17(r.qoi_discrete)
                << ',' << format_g17(r.qoi_exact) << ',' << format_g17(r.abs_error) << ','
                << format_g17(r.rel_error) << "\r\n";
    }
  } else {
    write_sweep_csv(rows, out);
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
  }
  return 0;
}

void write_scan_csv(const std::vector<ScanRow>& rows, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"theta1", "rel_error"});
  for (const auto& r : rows) csv.row({format_g17(r.theta1), format_g17(r.rel_error)});
}

void write_columns_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns, const std::string& path) {
  CsvWriter csv(path);
  csv.row(header);
  std::size_t nrows = columns.empty() ? 0 : columns[0].size();
  for (std::size_t i = 0; i < nrows; ++i) {
    std::vector<std::string> cells;
    cells.reserve(columns.size());
    for (const auto& col : columns) cells.push_back(format_g17(col[i]));
    csv.row(cells);
  }
}

// The three weight-training experiments of the 1D diffusion study: the
// closed-form optimal-test route plus the mixed route on 4- and 16-element
// test meshes.
struct Diffusion1dModels {
  Eigen::VectorXd theta_optimal;
  TrainOutputs vh4;
  TrainOutputs vh16;
};

Diffusion1dModels train_diffusion1d_suite(std::uint64_t seed, const std::string& out_dir) {
  const Benchmark& bench = find_benchmark("diffusion1d");
  Diffusion1dModels models;

  OptimalTestRelLoss rel_model(bench.neuron_count, bench.g_kind, 0.6, bench.training_lambdas);
  TrainConfig config;
  config.seed = seed;
  config.tolerance = bench.tolerance;
  config.max_iterations = bench.max_iterations;
  config.learning_rate = bench.learning_rate;
  TrainingRun rel_run = train(config, rel_model, random_initial_theta(rel_model.param_count(), seed));
  models.theta_optimal = rel_run.theta;
  save_weightnet_json(rel_model.make_net(rel_run.theta),
                      (fs::path(out_dir) / "diffusion1d_optimal_model.json").string());

  TrainOverrides over;
  over.seed = seed;
  models.vh4 = train_with_restarts(bench, 0, over, out_dir);
  models.vh16 = train_with_restarts(bench, 1, over, out_dir);
  return models;
}

int cmd_reproduce(const std::string& figure, std::uint64_t seed, const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto out_path = [&](const std::string& name) { return (fs::path(out_dir) / name).string(); };

  if (figure == "fig1a" || figure == "fig1b") {
    double lambda = figure == "fig1a" ? 0.15 : 0.05;
    auto rows = theta1_error_scan(-9.0, lambda, 0.1, 0.0, 100.0, 0.1);
    write_scan_csv(rows, out_path(figure + ".csv"));
    std::cout << "wrote " << out_path(figure + ".csv") << "\n";
    return 0;
  }

  if (figure == "fig3a" || figure == "fig3b" || figure == "fig3c") {
    const Benchmark& bench = find_benchmark("diffusion1d");
    Diffusion1dModels models = train_diffusion1d_suite(seed, out_dir);
    MixedDiscretization disc4 = make_discretization(bench, 0);
    MixedDiscretization disc16 = make_discretization(bench, 1);
    WeightNet net_opt = WeightNet::make(1, bench.neuron_count, bench.g_kind);
    net_opt.theta = models.theta_optimal;
    WeightNet net4 = load_weightnet_json(models.vh4.model_path);
    WeightNet net16 = load_weightnet_json(models.vh16.model_path);

    if (figure == "fig3a") {
      std::vector<double> xs = linspace(0.0, 1.0, 513);
      std::vector<double> w_opt, w4, w16;
      for (double x : xs) {
        w_opt.push_back(net_opt.weight1(x));
        w4.push_back(net4.weight1(x));
        w16.push_back(net16.weight1(x));
      }
      write_columns_csv({"x", "omega_optimal", "omega_vh4", "omega_vh16"}, {xs, w_opt, w4, w16},
                        out_path("fig3a.csv"));
    } else if (figure == "fig3b") {
      OptimalTestFunction1D phi_opt(net_opt);
      // projected optimal test functions of the mixed experiments
      auto projected = [](const MixedDiscretization& disc, const Eigen::VectorXd& theta) {
        Eigen::MatrixXd A = disc.assemble_gram(theta);
        return Eigen::VectorXd(Eigen::LLT<Eigen::MatrixXd>(A).solve(disc.bilinear()).col(0));
      };
      Eigen::VectorXd t4 = projected(disc4, net4.theta);
      Eigen::VectorXd t16 = projected(disc16, net16.theta);
      Space1D space4(build_interval_mesh(4, 0.0, 1.0), 1, BoundaryCondition::left_dirichlet);
      Space1D space16(build_interval_mesh(16, 0.0, 1.0), 1, BoundaryCondition::left_dirichlet);
      std::vector<double> xs = linspace(0.0, 1.0, 513);
      std::vector<double> p_opt, p4, p16;
      for (double x : xs) {
        p_opt.push_back(phi_opt(x));
        p4.push_back(space4.value(t4, x));
        p16.push_back(space16.value(t16, x));
      }
      write_columns_csv({"x", "phi_optimal", "phi_vh4", "phi_vh16"}, {xs, p_opt, p4, p16},
                        out_path("fig3b.csv"));
    } else {
      OptimalTestFunction1D phi_opt(net_opt);
      std::vector<double> grid = linspace(0.01, 0.99, 99);
      auto exact = [&](double lam) { return exact_qoi(bench, lam); };
      auto rows4 = qoi_error_sweep(disc4, net4.theta, grid, exact);
      auto rows16 = qoi_error_sweep(disc16, net16.theta, grid, exact);
      std::vector<double> err_opt, err4, err16;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        err_opt.push_back(optimal_test_rel_error(phi_opt, grid[i], 0.6));
        err4.push_back(rows4[i].rel_error);
        err16.push_back(rows16[i].rel_error);
      }
      write_columns_csv({"lambda", "rel_error_optimal", "rel_error_vh4", "rel_error_vh16"},
                        {grid, err_opt, err4, err16}, out_path("fig3c.csv"));
    }
    std::cout << "wrote " << out_path(figure + ".csv") << "\n";
    return 0;
  }

  struct SweepFigure {
    const char* benchmark;
    int variant;
    int grid_points;
  };
  const std::map<std::string, SweepFigure> sweep_figures = {
      {"fig5a", {"advection1d", 0, 101}},      {"fig5b", {"advection1d", 1, 101}},
      {"fig5c", {"advection1d", 2, 101}},      {"fig7a", {"advection1d2qoi", 0, 101}},
      {"fig7b", {"advection1d2qoi", 1, 101}},  {"fig7c", {"advection1d2qoi", 2, 101}},
      {"fig11a", {"diffusion2d", 0, 51}},      {"fig11b", {"diffusion2d", 1, 51}},
      {"fig11c", {"diffusion2d", 2, 51}},
  };
  auto it = sweep_figures.find(figure);
  if (it == sweep_figures.end()) throw ConfigError("unknown figure id: " + figure);

  const Benchmark& bench = find_benchmark(it->second.benchmark);
  TrainOverrides over;
  over.seed = seed;
  TrainOutputs trained = train_with_restarts(bench, it->second.variant, over, out_dir);
  std::cout << "training stop: " << to_string(trained.run.stop) << ", loss "
            << format_g17(trained.run.final_loss) << "\n";
  MixedDiscretization disc = make_discretization(bench, it->second.variant);
  auto exact = [&](double lam) { return exact_qoi(bench, lam); };
  auto rows = qoi_error_sweep(disc, trained.theta, linspace(0.0, 1.0, it->second.grid_points), exact);
  write_sweep_csv(rows, out_path(figure + ".csv"));
  std::cout << "wrote " << out_path(figure + ".csv") << "\n";
  return 0;
}

int cmd_dump_mesh(int elements, const std::string& grid, const std::string& split_name,
                  const std::string& out) {
  std::ostringstream buffer;
  if (!grid.empty()) {
    int nx = 0, ny = 0;
    if (std::sscanf(grid.c_str(), "%dx%d", &nx, &ny) != 2) {
      throw ConfigError("--grid expects NXxNY, e.g. 16x16");
    }
    SquareSplit split = split_name == "diagonal" ? SquareSplit::diagonal : SquareSplit::crisscross;
    if (split_name != "diagonal" && split_name != "crisscross") {
      throw ConfigError("--split must be diagonal or crisscross");
    }
    write_mesh_csv(build_rect_mesh(nx, ny, split), buffer);
  } else {
    write_mesh_csv(build_interval_mesh(elements, 0.0, 1.0), buffer);
  }
  if (out.empty()) {
    std::cout << buffer.str();
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ConfigError("cannot open for writing: " + out);
    f << buffer.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"goal-oriented finite elements with trained test-space weights"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "run the offline procedure for a benchmark");
  std::string train_target, train_out = "runs";
  int train_variant = 0, train_restarts = 0;
  TrainOverrides over;
  std::uint64_t train_seed = 42;
  train_cmd->add_option("benchmark", train_target, "benchmark id or a benchmark JSON file")
      ->required();
  train_cmd->add_option("--variant", train_variant, "trial/test size variant index");
  train_cmd->add_option("--seed", train_seed, "random seed for the initial parameters");
  train_cmd->add_option("--tol", over.tolerance, "stopping tolerance on the loss");
  train_cmd->add_option("--max-iters", over.max_iterations, "iteration cap");
  train_cmd->add_option("--lr", over.learning_rate, "learning rate");
  train_cmd->add_option("--restarts", train_restarts, "extra fresh-seed attempts if training stalls");
  train_cmd->add_option("--out", train_out, "output directory");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate QoIs from a stored artifact");
  std::string eval_artifact, eval_benchmark, eval_sweep, eval_out;
  int eval_variant = 0;
  double eval_lambda = 0.0;
  bool have_lambda = false;
  eval_cmd->add_option("artifact", eval_artifact, "manifest JSON, condensed .bin, or model JSON")
      ->required();
  eval_cmd->add_option("--benchmark", eval_benchmark, "benchmark id (for raw model/condensed files)");
  eval_cmd->add_option("--variant", eval_variant, "variant index (with --benchmark)");
  auto* lambda_opt = eval_cmd->add_option("--lambda", eval_lambda, "single parameter value");
  eval_cmd->add_option("--sweep", eval_sweep, "lambda grid as begin:end:steps");
  eval_cmd->add_option("--out", eval_out, "CSV path for sweep output");

  // reproduce
  auto* rep_cmd = app.add_subcommand("reproduce", "emit the CSV tables behind a study figure");
  std::string rep_figure, rep_out = "figures";
  std::uint64_t rep_seed = 42;
  rep_cmd->add_option("figure", rep_figure,
                      "one of fig1a fig1b fig3a fig3b fig3c fig5a-c fig7a-c fig11a-c")
      ->required();
  rep_cmd->add_option("--seed", rep_seed, "training seed");
  rep_cmd->add_option("--out", rep_out, "output directory");

  // dump-mesh
  auto* mesh_cmd = app.add_subcommand("dump-mesh", "write a mesh as CSV for debugging");
  int mesh_elements = 8;
  std::string mesh_grid, mesh_split = "crisscross", mesh_out;
  mesh_cmd->add_option("--elements", mesh_elements, "1D element count");
  mesh_cmd->add_option("--grid", mesh_grid, "2D grid as NXxNY");
  mesh_cmd->add_option("--split", mesh_split, "diagonal or crisscross");
  mesh_cmd->add_option("--out", mesh_out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (train_cmd->parsed()) {
      over.seed = train_seed;
      return cmd_train(train_target, train_variant, over, train_restarts, train_out);
    }
    if (eval_cmd->parsed()) {
      have_lambda = lambda_opt->count() > 0;
      if (have_lambda == !eval_sweep.empty()) {
        throw ConfigError("eval needs exactly one of --lambda or --sweep");
      }
      return cmd_eval(eval_artifact, eval_benchmark, eval_variant, eval_lambda, have_lambda,
                      eval_sweep, eval_out);
    }
    if (rep_cmd->parsed()) return cmd_reproduce(rep_figure, rep_seed, rep_out);
    if (mesh_cmd->parsed()) return cmd_dump_mesh(mesh_elements, mesh_grid, mesh_split, mesh_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
