#include "stvsa/numerics/losses.hpp"

#include <cmath>

namespace stvsa::num {

GanLossMode gan_loss_mode_from_string(const std::string &s) {
  if (s == "least-squares") return GanLossMode::kLeastSquares;
  if (s == "cross-entropy") return GanLossMode::kCrossEntropy;
  fail("config", "unknown gan loss mode '" + s + "'");
}

std::string to_string(GanLossMode mode) {
  return mode == GanLossMode::kLeastSquares ? "least-squares" : "cross-entropy";
}

GanLosses gan_losses(std::span<const double> d_real,
                     std::span<const double> d_fake, GanLossMode mode) {
  if (d_real.empty() || d_fake.empty())
    fail("domain", "gan_losses requires non-empty score batches");
  GanLosses out;
  if (mode == GanLossMode::kLeastSquares) {
    double sr = 0.0, sf = 0.0, sg = 0.0;
    for (double d : d_real) sr += (d - 1.0) * (d - 1.0);
    for (double d : d_fake) {
      sf += d * d;
      sg += (d - 1.0) * (d - 1.0);
    }
    out.discriminator = 0.5 * sr / static_cast<double>(d_real.size()) +
                        0.5 * sf / static_cast<double>(d_fake.size());
    out.generator = 0.5 * sg / static_cast<double>(d_fake.size());
  } else {
    double sr = 0.0, sf = 0.0, sg = 0.0;
    for (double p : d_real) {
      if (p <= 0.0 || p >= 1.0)
        fail("domain", "cross-entropy mode requires sigmoid scores in (0,1)");
      sr += std::log(p);
    }
    for (double p : d_fake) {
      if (p <= 0.0 || p >= 1.0)
        fail("domain", "cross-entropy mode requires sigmoid scores in (0,1)");
      sf += std::log(1.0 - p);
      sg += std::log(p);
    }
    out.discriminator = -sr / static_cast<double>(d_real.size()) -
                        sf / static_cast<double>(d_fake.size());
    out.generator = -sg / static_cast<double>(d_fake.size());
  }
  return out;
}

double mse_loss(const DenseArray &predictions, const DenseArray &targets) {
  if (predictions.rank() != 2 || targets.rank() != 2 ||
      predictions.shape[0] != targets.shape[0] ||
      predictions.shape[1] != targets.shape[1])
    fail("shape", "mse_loss rows mismatch: " + shape_str(predictions.shape) +
                    " vs " + shape_str(targets.shape));
  const std::size_t r = predictions.shape[0], c = predictions.shape[1];
  for (std::size_t i = 0; i < r; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += predictions.at(i, j);
    if (std::abs(s - 1.0) > 1e-6)
      fail("domain", "prediction row " + std::to_string(i) +
                       " does not sum to 1");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < r * c; ++i) {
    const double d = predictions.values[i] - targets.values[i];
    total += d * d;
  }
  return total / static_cast<double>(r);
}

} // namespace stvsa::num
