#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stvsa/numerics/array.hpp"
#include "stvsa/numerics/graph.hpp"

namespace stvsa::num {

struct AdamConfig {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Per-parameter-set Adam accumulators. Moments are zero-initialized on first
/// use; the step counter advances by one per update() call.
struct AdamState {
  std::map<std::string, DenseArray> first_moment;
  std::map<std::string, DenseArray> second_moment;
  long step = 0;
};

/// Single-array bias-corrected Adam update; step is 1-based.
void adam_step(DenseArray &param, const DenseArray &grad, DenseArray &m,
               DenseArray &v, long step, const AdamConfig &cfg);

/// Applies Adam to the named subset of a ParameterStore.
class AdamOptimizer {
public:
  AdamOptimizer(AdamConfig cfg, std::vector<std::string> param_names)
    : cfg_(cfg), names_(std::move(param_names)) {}

  void update(ParameterStore &params,
              const std::map<std::string, DenseArray> &grads);

  const AdamState &state() const { return state_; }
  const AdamConfig &config() const { return cfg_; }

private:
  AdamConfig cfg_;
  AdamState state_;
  std::vector<std::string> names_;
};

} // namespace stvsa::num
