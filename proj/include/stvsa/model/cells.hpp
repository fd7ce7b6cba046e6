#pragma once

#include <string>
#include <utility>

#include "stvsa/numerics/graph.hpp"
#include "stvsa/numerics/rng.hpp"

namespace stvsa::model {

struct RnnDims {
  int input = 0;
  int hidden = 0;
};

/// Gated recurrent cell:
///   r = sigmoid(W_r x + U_r h_prev + b_r)
///   z = sigmoid(W_z x + U_z h_prev + b_z)
///   hc = tanh(W_h x + r .* (U_h h_prev) + b_h)
///   h  = (1 - z) .* h_prev + z .* hc
void create_gru_params(num::ParameterStore &store, const std::string &prefix,
                       const RnnDims &dims, num::Rng &rng);
int gru_step(num::Graph &g, const std::string &prefix, const RnnDims &dims,
             int x_t, int h_prev);

/// Standard LSTM cell with input/forget/output gates and a cell state.
/// Returns (h, c).
void create_lstm_params(num::ParameterStore &store, const std::string &prefix,
                        const RnnDims &dims, num::Rng &rng);
std::pair<int, int> lstm_step(num::Graph &g, const std::string &prefix,
                              const RnnDims &dims, int x_t, int h_prev,
                              int c_prev);

} // namespace stvsa::model
