#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "stvsa/data/dataset.hpp"
#include "stvsa/numerics/graph.hpp"

namespace stvsa::model {

enum class Variant { kBiGruAttention, kGru, kLstm };
Variant variant_from_string(const std::string &s);
std::string to_string(Variant v);

struct ClassifierConfig {
  double learning_rate = 1e-4;
  int batch_size = 64;
  int epochs = 200;
  double dropout = 0.25;
  int hidden = 64;
  int attention_size = 8;
  std::uint64_t seed = 1;
  bool early_exit = false;        // optional stop when train loss < threshold
  double early_exit_loss = 1e-5;
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0; // NaN when no held-out set was given
};

struct Assessment {
  int verdict = 0; // 1 = stable, 0 = unstable
  double probability_stable = 0.0;
  double latency_ms = 0.0;
};

/// Sequence classifier over observation windows [q, m], m = 3L. The main
/// variant runs a forward and a backward recurrent pass, concatenates the
/// per-step hidden states, pools them with a learned attention over time,
/// and maps the pooled vector through an affine layer and softmax. The GRU
/// and LSTM baselines are unidirectional with a temporal mean pool instead
/// of attention. Dropout acts on the recurrent output sequence and on the
/// pooled vector, only in training mode.
class SequenceClassifier {
public:
  SequenceClassifier(Variant variant, int steps, int features_per_step,
                     const ClassifierConfig &config, std::uint64_t init_seed);

  Variant variant() const { return variant_; }
  int steps() const { return steps_; }
  int features_per_step() const { return features_per_step_; }
  int hidden() const { return config_.hidden; }
  const ClassifierConfig &config() const { return config_; }

  num::ParameterStore &params() { return params_; }
  const num::ParameterStore &params() const { return params_; }

  data::NormalizationBounds &bounds() { return bounds_; }
  const data::NormalizationBounds &bounds() const { return bounds_; }

  /// Class probabilities for a batch of flattened normalized windows
  /// [B, q*m] -> [B, 2]. Inference mode unless train_mode is set.
  num::DenseArray predict(const num::DenseArray &x, bool train_mode = false,
                          std::uint64_t dropout_seed = 0) const;

  /// Attention weights over time for one batch, [B, q]. Only meaningful for
  /// the attention variant; baselines return uniform weights.
  num::DenseArray attention_weights(const num::DenseArray &x) const;

  /// Forward + loss graph evaluation for training; returns (loss, probs).
  std::pair<double, num::DenseArray>
  train_step(const num::DenseArray &x, const num::DenseArray &targets,
             std::uint64_t dropout_seed,
             std::map<std::string, num::DenseArray> &gradients);

private:
  struct BatchGraph {
    num::Graph graph;
    int probs = -1;
    int attention = -1;
    int loss = -1;
  };
  BatchGraph &graph_for(int batch) const;

  Variant variant_;
  int steps_, features_per_step_;
  ClassifierConfig config_;
  num::ParameterStore params_;
  data::NormalizationBounds bounds_;
  mutable std::map<int, std::unique_ptr<BatchGraph>> graphs_;
  // Graph buffers are shared across calls; concurrent assess() serializes.
  std::unique_ptr<std::mutex> eval_mutex_ = std::make_unique<std::mutex>();
};

struct TrainResult {
  std::vector<EpochStats> curve;
};

/// Mini-batch Adam training on the mean squared distance between softmax
/// outputs and one-hot targets. x_test may be empty. Deterministic per seed.
TrainResult train_classifier(SequenceClassifier &model,
                             const num::DenseArray &x_train,
                             const std::vector<int> &y_train,
                             const num::DenseArray &x_test,
                             const std::vector<int> &y_test);

double accuracy_on(const SequenceClassifier &model, const num::DenseArray &x,
                   const std::vector<int> &y);

/// Stable-class probabilities for a sample matrix, evaluated in chunks.
std::vector<double> stable_scores(const SequenceClassifier &model,
                                  const num::DenseArray &x);

/// Online assessment of one raw window [q, m]: applies the stored
/// normalization bounds, runs an inference forward pass, and reports the
/// verdict with measured wall-clock latency.
Assessment assess(const SequenceClassifier &model,
                  const num::DenseArray &window);

/// Checkpoint persistence (named-array container with a variant/shape/bounds
/// header). Loading reconstructs the model and its normalization bounds.
void save_classifier(const std::string &path, const SequenceClassifier &model);
SequenceClassifier load_classifier(const std::string &path);

} // namespace stvsa::model
