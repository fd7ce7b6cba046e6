#pragma once

#include <string>
#include <vector>

#include "stvsa/data/trajectory.hpp"

namespace stvsa::data {

/// One flattened observation window plus its bookkeeping columns.
struct WindowRecord {
  long sample_id = -1;
  int label = -1; // 1=stable, 0=unstable, -1=unlabeled
  std::string origin = "simulated";
  long scenario_id = -1;
  std::vector<double> features; // q x 3L, row-major by time step
};

struct WindowSet {
  int q = 0;           // steps per window
  int feature_dim = 0; // 3L features per step
  std::vector<WindowRecord> records;

  std::size_t size() const { return records.size(); }
  int flat_dim() const { return q * feature_dim; }
  const WindowRecord *find(long sample_id) const;
};

struct Partition {
  std::vector<long> train_ids;
  std::vector<long> test_ids;
};

/// Per-flattened-feature min/max over the training portion; normalize maps
/// the training extrema exactly onto [-1, 1].
struct NormalizationBounds {
  std::vector<double> min;
  std::vector<double> max;
};

NormalizationBounds compute_bounds(const WindowSet &set,
                                   const std::vector<long> &train_ids);
std::vector<double> normalize(const std::vector<double> &x,
                              const NormalizationBounds &b);
std::vector<double> denormalize(const std::vector<double> &x,
                                const NormalizationBounds &b);

/// Random disjoint train/test partition, stratified by label so each class
/// keeps the requested ratio within one sample.
Partition stratified_split(const WindowSet &set, int ratio_train,
                           int ratio_test, std::uint64_t seed);

/// Scenario metadata kept alongside the dataset for diagnostics.
struct ScenarioRecord {
  Scenario scenario;
  SimOutcome outcome;
};

// ---- CSV formats ----
// windows:      sample_id,label,origin,scenario_id,f_<t>_<j>...
// trajectories: sample_id,label,origin,scenario_id,clear_step,dt,
//               v_<t>_<b>...,p_<t>_<b>...,q_<t>_<b>...
// partition:    sample_id,split            (split is "train" or "test")
// scenarios:    scenario_id,load_level,motor_fraction,line_id,
//               fault_location,clearing_time,seed,ground_truth,dynamics,
//               p_unstable

void write_windows_csv(const std::string &path, const WindowSet &set);
WindowSet read_windows_csv(const std::string &path);

void write_partition_csv(const std::string &path, const Partition &p);
Partition read_partition_csv(const std::string &path);

void write_trajectories_csv(const std::string &path,
                            const std::vector<TrajectorySample> &samples);
std::vector<TrajectorySample> read_trajectories_csv(const std::string &path);

void write_scenarios_csv(const std::string &path,
                         const std::vector<ScenarioRecord> &records);
std::vector<ScenarioRecord> read_scenarios_csv(const std::string &path);

} // namespace stvsa::data
