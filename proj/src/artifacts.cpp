#include "goalfem/artifacts.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "goalfem/csv.hpp"
#include "goalfem/errors.hpp"
#include "goalfem/rng.hpp"

namespace goalfem {

std::string config_hash(const std::string& canonical_text) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canonical_text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string iso8601_utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["benchmark"] = benchmark_id;
  j["variant"] = variant;
  j["variant_name"] = variant_name;
  j["config_hash"] = config_hash;
  j["seed"] = seed;
  j["created_at"] = created_at;
  j["artifacts"] = artifacts;
  return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open manifest: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("corrupt manifest " + path + ": " + e.what());
  }
  RunManifest m;
  m.benchmark_id = j.at("benchmark").get<std::string>();
  m.variant = j.at("variant").get<int>();
  m.variant_name = j.value("variant_name", "");
  m.config_hash = j.at("config_hash").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.created_at = j.value("created_at", "");
  m.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  return m;
}

void write_training_log_csv(const TrainingRun& run, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"iteration", "loss", "gradient_norm", "wall_time_ms"});
  for (const auto& rec : run.history) {
    csv.row({std::to_string(rec.iteration), format_g17(rec.loss), format_g17(rec.grad_norm),
             format_g17(rec.wall_ms)});
  }
}

void write_training_run_json(const TrainingRun& run, const std::string& path) {
  nlohmann::json j;
  j["optimizer"] = to_string(run.config.optimizer);
  j["learning_rate"] = run.config.learning_rate;
  j["max_iterations"] = run.config.max_iterations;
  j["tolerance"] = run.config.tolerance;
  j["seed"] = run.config.seed;
  j["iterations"] = run.iterations;
  j["final_loss"] = run.final_loss;
  j["stop_reason"] = to_string(run.stop);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
  CsvWriter csv(path);
  csv.row({"lambda", "qoi_index", "qoi_discrete", "qoi_exact", "abs_error", "rel_error"});
  for (const auto& r : rows) {
    csv.row({format_g17(r.lambda), std::to_string(r.qoi_index), format_g17(r.qoi_discrete),
             format_g17(r.qoi_exact), format_g17(r.abs_error), format_g17(r.rel_error)});
  }
}

namespace {

std::string resolved_config_text(const Benchmark& bench, int variant_index,
                                 const TrainConfig& config) {
  nlohmann::json j;
  j["benchmark"] = bench.id;
  j["variant"] = bench.variants[variant_index].name;
  j["neurons"] = bench.neuron_count;
  j["g"] = to_string(bench.g_kind);
  j["lambdas"] = bench.training_lambdas;
  j["tolerance"] = config.tolerance;
  j["learning_rate"] = config.learning_rate;
  j["max_iterations"] = config.max_iterations;
  j["optimizer"] = to_string(config.optimizer);
  j["seed"] = config.seed;
  return j.dump();
}

}  // namespace

TrainOutputs run_training(const Benchmark& bench, int variant_index, const TrainOverrides& over,
                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  TrainConfig config;
  config.seed = over.seed;
  config.tolerance = over.tolerance > 0 ? over.tolerance : bench.tolerance;
  config.max_iterations = over.max_iterations > 0 ? over.max_iterations : bench.max_iterations;
  config.learning_rate = over.learning_rate > 0 ? over.learning_rate : bench.learning_rate;

  MixedDiscretization disc = make_discretization(bench, variant_index);
  MixedQoiLoss model(disc, make_training_set(bench));
  Eigen::VectorXd theta0 = random_initial_theta(disc.param_count(), config.seed);
  TrainingRun run = train(config, model, std::move(theta0));

  TrainOutputs out;
  out.run = run;
  out.theta = run.theta;

  const std::string stem = bench.id + "_" + bench.variants[variant_index].name;
  out.model_path = (fs::path(out_dir) / (stem + "_model.json")).string();
  out.condensed_path = (fs::path(out_dir) / (stem + "_condensed.bin")).string();
  out.log_path = (fs::path(out_dir) / (stem + "_training_log.csv")).string();
  out.manifest_path = (fs::path(out_dir) / (stem + "_manifest.json")).string();

  WeightNet net = disc.make_net(run.theta);
  save_weightnet_json(net, out.model_path);
  disc.condense(run.theta).save(out.condensed_path);
  write_training_log_csv(run, out.log_path);
  write_training_run_json(run, (fs::path(out_dir) / (stem + "_run.json")).string());

  RunManifest manifest;
  manifest.benchmark_id = bench.id;
  manifest.variant = variant_index;
  manifest.variant_name = bench.variants[variant_index].name;
  manifest.config_hash = config_hash(resolved_config_text(bench, variant_index, config));
  manifest.seed = config.seed;
  manifest.created_at = iso8601_utc_now();
  manifest.artifacts = {{"model", out.model_path},
                        {"condensed", out.condensed_path},
                        {"training_log", out.log_path},
                        {"manifest", out.manifest_path}};
  std::ofstream mf(out.manifest_path, std::ios::binary);
  if (!mf) throw ConfigError("cannot open for writing: " + out.manifest_path);
  mf << manifest.to_json();
  out.manifest = manifest;
  return out;
}

TrainOutputs train_with_restarts(const Benchmark& bench, int variant_index,
                                 const TrainOverrides& over, const std::string& out_dir,
                                 int max_restarts) {
  std::uint64_t best_seed = over.seed;
  double best_loss = -1.0;
  for (int attempt = 0; attempt <= max_restarts; ++attempt) {
    TrainOverrides attempt_over = over;
    attempt_over.seed = over.seed + static_cast<std::uint64_t>(attempt);
    TrainOutputs out = run_training(bench, variant_index, attempt_over, out_dir);
    if (out.run.stop == StopReason::tolerance_reached) return out;
    if (best_loss < 0.0 || out.run.final_loss < best_loss) {
      best_loss = out.run.final_loss;
      best_seed = attempt_over.seed;
    }
    if (attempt == max_restarts && best_seed == attempt_over.seed) return out;
  }
  // No attempt reached tolerance: restore the artifacts of the best one.
  TrainOverrides o = over;
  o.seed = best_seed;
  return run_training(bench, variant_index, o, out_dir);
}

}  // namespace goalfem
