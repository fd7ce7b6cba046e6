#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "stvsa/numerics/graph.hpp"
#include "stvsa/numerics/losses.hpp"

namespace stvsa::gan {

/// One-hot class encoding; label must lie in [0, class_count).
std::vector<double> one_hot(int label, int class_count);

struct GanTrainConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.5;
  int disc_steps = 4; // discriminator updates per generator update
  int batch_size = 32;
  int iterations = 3000;
  int snapshot_every = 250;
  int snapshot_samples = 256;
  std::uint64_t seed = 1;
};

struct GanHistoryEntry {
  int iteration = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
};

struct FidelitySnapshot {
  int iteration = 0;
  double wd = 0.0;
  double mmd = 0.0;
  double fid = 0.0;
};

/// Conditional adversarial pair over flattened normalized windows. The
/// generator maps (noise, one-hot label) through fully connected leaky-ReLU
/// layers to a tanh output in (-1,1)^data_dim; the discriminator maps
/// (window, one-hot label) to a single linear score. Least-squares mode
/// trains on the quadratic losses; cross-entropy mode is the conditional
/// GAN baseline with a sigmoid on the score.
class GenerativeModel {
public:
  GenerativeModel(int data_dim, int noise_dim, int class_count,
                  num::GanLossMode mode, std::vector<int> gen_hidden,
                  std::vector<int> disc_hidden, std::uint64_t init_seed);

  int data_dim() const { return data_dim_; }
  int noise_dim() const { return noise_dim_; }
  int class_count() const { return class_count_; }
  num::GanLossMode mode() const { return mode_; }
  const std::vector<int> &gen_hidden() const { return gen_hidden_; }
  const std::vector<int> &disc_hidden() const { return disc_hidden_; }
  bool trained() const { return trained_; }
  void set_trained(bool t) { trained_ = t; }

  num::ParameterStore &params() { return params_; }
  const num::ParameterStore &params() const { return params_; }
  std::vector<std::string> generator_param_names() const;
  std::vector<std::string> discriminator_param_names() const;

  /// Generator forward for a batch of (noise, one-hot) inputs; [B, data_dim].
  num::DenseArray generate_batch(const num::DenseArray &noise,
                                 const num::DenseArray &onehot) const;

  /// Discriminator scores for a batch of (window, one-hot) inputs; [B, 1].
  /// Cross-entropy mode returns the sigmoid of the linear score.
  num::DenseArray score_batch(const num::DenseArray &windows,
                              const num::DenseArray &onehot) const;

  /// Balanced conditional sampling: count samples per class, deterministic
  /// in the seed. Returns normalized windows and their labels.
  std::pair<num::DenseArray, std::vector<int>>
  sample(int count_per_class, std::uint64_t seed) const;

  const std::vector<GanHistoryEntry> &history() const { return history_; }
  const std::vector<FidelitySnapshot> &snapshots() const { return snapshots_; }
  std::vector<GanHistoryEntry> &mutable_history() { return history_; }
  std::vector<FidelitySnapshot> &mutable_snapshots() { return snapshots_; }

private:
  num::Graph &generator_graph(int batch) const;
  num::Graph &scorer_graph(int batch) const;

  int data_dim_, noise_dim_, class_count_;
  num::GanLossMode mode_;
  std::vector<int> gen_hidden_, disc_hidden_;
  num::ParameterStore params_;
  bool trained_ = false;
  std::vector<GanHistoryEntry> history_;
  std::vector<FidelitySnapshot> snapshots_;

  mutable std::map<int, std::unique_ptr<num::Graph>> gen_graphs_;
  mutable std::map<int, std::unique_ptr<num::Graph>> score_graphs_;
};

/// Alternating adversarial training: per iteration, disc_steps discriminator
/// Adam updates followed by one generator Adam update, with losses recorded
/// every iteration and WD/MMD/FID snapshots against `reference` taken at
/// iteration 0 and every snapshot_every iterations. Deterministic per seed.
GenerativeModel
train_gan(const num::DenseArray &windows, const std::vector<int> &labels,
          const num::DenseArray &reference, const GanTrainConfig &config,
          num::GanLossMode mode = num::GanLossMode::kLeastSquares,
          int noise_dim = 100, const std::vector<int> &gen_hidden = {256, 256},
          const std::vector<int> &disc_hidden = {256, 128});

/// Checkpoint persistence in the shared named-array container.
void save_gan(const std::string &path, const GenerativeModel &model);
GenerativeModel load_gan(const std::string &path);

} // namespace stvsa::gan
