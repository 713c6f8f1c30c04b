#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "goalfem/benchmarks.hpp"
#include "goalfem/training.hpp"

namespace goalfem {

/// Record of one training run: where the artifacts live and the resolved
/// configuration they came from.
struct RunManifest {
  std::string benchmark_id;
  int variant = 0;
  std::string variant_name;
  std::string config_hash;  // FNV-1a over the canonical resolved config
  std::uint64_t seed = 42;
  std::string created_at;  // ISO 8601, UTC
  std::map<std::string, std::string> artifacts;  // name -> path

  std::string to_json() const;
  static RunManifest from_json_file(const std::string& path);
};

struct TrainOverrides {
  std::uint64_t seed = 42;
  double tolerance = -1.0;    // <= 0 keeps the benchmark value
  int max_iterations = -1;    // <= 0 keeps the benchmark value
  double learning_rate = -1.0;
};

struct TrainOutputs {
  RunManifest manifest;
  TrainingRun run;
  Eigen::VectorXd theta;
  std::string model_path;
  std::string condensed_path;
  std::string log_path;
  std::string manifest_path;
};

/// Train one benchmark variant and write the four artifacts (model JSON,
/// condensed operator, training log CSV, manifest) under out_dir. Model and
/// condensed files depend only on (config, seed).
TrainOutputs run_training(const Benchmark& bench, int variant_index, const TrainOverrides& over,
                          const std::string& out_dir);

/// Same as run_training, but when the optimizer stalls above tolerance the
/// run is repeated with seed+1, seed+2, ... (at most max_restarts extra
/// attempts). The best run is kept. Deterministic for a fixed base seed.
TrainOutputs train_with_restarts(const Benchmark& bench, int variant_index,
                                 const TrainOverrides& over, const std::string& out_dir,
                                 int max_restarts = 5);

void write_training_log_csv(const TrainingRun& run, const std::string& path);
void write_training_run_json(const TrainingRun& run, const std::string& path);
void write_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);

std::string config_hash(const std::string& canonical_text);
std::string iso8601_utc_now();

}  // namespace goalfem
