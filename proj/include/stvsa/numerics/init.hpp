#pragma once

#include "stvsa/numerics/array.hpp"
#include "stvsa/numerics/rng.hpp"

namespace stvsa::num {

/// Glorot-uniform fill for a [fan_in, fan_out] weight matrix.
inline void glorot_uniform(DenseArray &w, Rng &rng) {
  const double fan_in = static_cast<double>(w.shape[0]);
  const double fan_out =
    static_cast<double>(w.rank() >= 2 ? w.shape[1] : w.shape[0]);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (double &v : w.values) v = rng.uniform(-limit, limit);
}

inline void normal_fill(DenseArray &w, Rng &rng, double stddev) {
  for (double &v : w.values) v = rng.normal(0.0, stddev);
}

} // namespace stvsa::num
