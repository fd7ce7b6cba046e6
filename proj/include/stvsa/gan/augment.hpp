#pragma once

#include <cstdint>

#include "stvsa/data/dataset.hpp"
#include "stvsa/gan/model.hpp"

namespace stvsa::gan {

struct AugmentResult {
  data::WindowSet dataset;
  data::Partition partition;
  int generated_count = 0;
};

/// Inflates the dataset to target_total samples by adding generated windows
/// to the training partition only, class-balanced (counts differ by at most
/// one when odd). Generated samples are denormalized through the training
/// bounds, carry origin "gan", and never enter the test partition.
AugmentResult augment(const data::WindowSet &original,
                      const data::Partition &partition,
                      const GenerativeModel &model,
                      const data::NormalizationBounds &bounds,
                      std::size_t target_total, std::uint64_t seed);

} // namespace stvsa::gan
