#pragma once

#include <string>

#include "stvsa/pipeline/config.hpp"

namespace stvsa::pipeline {

/// Stage 1a: scenario grid, surrogate simulation, rule-based prelabels,
/// window extraction. Writes scenarios, trajectories, and windows CSVs.
void cmd_generate(const PipelineConfig &cfg);

/// Stage 1b: semi-supervised clustering of the prelabel-ambiguous samples,
/// silhouette comparison against the constrained k-means baseline, label
/// completion, and the stratified train/test split.
void cmd_label(const PipelineConfig &cfg);

/// Stage 2: adversarial training (one run per configured seed), fidelity
/// trajectory, and the inflated dataset at target_total samples.
void cmd_augment(const PipelineConfig &cfg);

/// Stage 3: offline training of the configured classifier variant.
void cmd_train(const PipelineConfig &cfg);

/// Full evaluation report over the test partition. counts_fixture, when
/// non-empty, points at a JSON file {tp, fn, fp, tn}; the report is then
/// computed from those counts directly.
void cmd_eval(const PipelineConfig &cfg,
              const std::string &counts_fixture = "");

/// Accuracy over a sweep of observation-window lengths, retraining with the
/// reduced epoch budget per window.
void cmd_sweep_otw(const PipelineConfig &cfg);

/// Test accuracy/MCC/F1/AUC under additive measurement noise per configured
/// SNR level.
void cmd_noise(const PipelineConfig &cfg);

/// Stage 4: single-window online assessment; prints verdict, probability,
/// and measured latency.
void cmd_assess(const PipelineConfig &cfg, const std::string &window_path);

} // namespace stvsa::pipeline
