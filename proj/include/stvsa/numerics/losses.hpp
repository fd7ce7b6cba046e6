#pragma once

#include <span>

#include "stvsa/numerics/array.hpp"

namespace stvsa::num {

enum class GanLossMode { kLeastSquares, kCrossEntropy };

GanLossMode gan_loss_mode_from_string(const std::string &s);
std::string to_string(GanLossMode mode);

struct GanLosses {
  double discriminator = 0.0;
  double generator = 0.0;
};

/// Adversarial losses over batches of discriminator scores.
///
/// Least-squares mode (real target 1, fake target 0, generator target 1):
///   L(D) = 1/2 mean[(d_real - 1)^2] + 1/2 mean[d_fake^2]
///   L(G) = 1/2 mean[(d_fake - 1)^2]
/// Cross-entropy mode expects scores already mapped through a sigmoid into
/// (0,1) and evaluates the usual log losses.
GanLosses gan_losses(std::span<const double> d_real,
                     std::span<const double> d_fake, GanLossMode mode);

/// Mean over the batch of the squared Euclidean distance between each
/// probability row and its one-hot target row.
double mse_loss(const DenseArray &predictions, const DenseArray &targets);

} // namespace stvsa::num
