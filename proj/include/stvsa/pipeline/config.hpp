#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stvsa::pipeline {

struct DataConfig {
  int bus_count = 10;
  double dt = 0.01;
  int horizon = 300; // steps
  int lines = 10;
  int clearing_time_count = 2;
  double window_seconds = 0.03;
  double ambiguous_share = 0.30;
};

struct LabelingConfig {
  int clusters = 2;
  double alpha = 1.0;
  double tol = 1e-6;
  int max_iter = 300;
  int split_train = 3;
  int split_test = 1;
};

struct AugmentSection {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  int disc_steps = 4;
  int batch_size = 32;
  int iterations = 3000;
  int noise_dim = 100;
  int snapshot_every = 250;
  int snapshot_samples = 256;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::size_t target_total = 10640;
  std::string loss_mode = "least-squares";
  std::vector<int> gen_hidden{256, 256};
  std::vector<int> disc_hidden{256, 128};
};

struct ClassifierSection {
  double learning_rate = 1e-4;
  int batch_size = 64;
  int epochs = 200;
  double dropout = 0.25;
  int hidden = 64;
  int attention_size = 8;
  std::string variant = "bigru-attention";
  std::string train_on = "final"; // "final" or "labeled"
};

struct EvaluationConfig {
  std::vector<double> snr_db{50, 40, 30};
  std::vector<double> otw_ms{10, 20, 30, 40, 50};
  int otw_epochs = 50;
  int latency_samples = 100;
};

struct Paths {
  std::string out = "out";
  std::string windows = "windows.csv";
  std::string trajectories = "trajectories.csv";
  std::string scenarios = "scenarios.csv";
  std::string labeled = "windows_labeled.csv";
  std::string partition = "partition.csv";
  std::string final_windows = "windows_final.csv";
  std::string final_partition = "partition_final.csv";
  std::string gan_checkpoint = "gan.ckpt";
  std::string model_checkpoint = "model.ckpt";
  std::string sc_report = "sc_report.json";
  std::string fidelity = "fidelity.csv";
  std::string fidelity_report = "fidelity_report.json";
  std::string curves = "train_curves.csv";
  std::string eval_report = "eval_report.json";
  std::string roc = "roc.csv";
  std::string otw = "otw_sweep.csv";
  std::string noise = "noise_eval.csv";
};

struct PipelineConfig {
  std::uint64_t seed = 7;
  DataConfig data;
  LabelingConfig labeling;
  AugmentSection augment;
  ClassifierSection classifier;
  EvaluationConfig evaluation;
  Paths paths;

  /// Joins a configured file name onto the output directory unless the name
  /// is already an absolute or explicitly relative path.
  std::string resolve(const std::string &name) const;
};

PipelineConfig default_config();

/// Loads a JSON config; keys present override defaults, everything else
/// keeps the documented default values.
PipelineConfig load_config(const std::string &path);

std::string config_to_json(const PipelineConfig &cfg);

} // namespace stvsa::pipeline
