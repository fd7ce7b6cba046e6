#include "stvsa/gan/augment.hpp"

#include <algorithm>

#include "stvsa/numerics/rng.hpp"

namespace stvsa::gan {

AugmentResult augment(const data::WindowSet &original,
                      const data::Partition &partition,
                      const GenerativeModel &model,
                      const data::NormalizationBounds &bounds,
                      std::size_t target_total, std::uint64_t seed) {
  if (!model.trained()) fail("train", "augment requires a trained model");
  if (target_total < original.size())
    fail("config", "target total " + std::to_string(target_total) +
                     " is below the original dataset size");
  if (model.class_count() != 2)
    fail("config", "augment assumes the binary stability task");

  AugmentResult out;
  out.dataset = original;
  out.partition = partition;
  out.generated_count = static_cast<int>(target_total - original.size());
  if (out.generated_count == 0) return out;

  const int n_stable = (out.generated_count + 1) / 2;
  const int n_unstable = out.generated_count - n_stable;
  const int per_class = std::max(n_stable, n_unstable);

  auto [normalized, labels] = model.sample(per_class, seed);

  long next_id = 0;
  for (const data::WindowRecord &r : original.records)
    next_id = std::max(next_id, r.sample_id + 1);

  int taken[2] = {0, 0};
  const int want[2] = {n_unstable, n_stable}; // label 0 = unstable, 1 = stable
  const std::size_t d = normalized.shape[1];
  std::vector<double> row(d);
  for (std::size_t i = 0; i < normalized.shape[0]; ++i) {
    const int label = labels[i];
    if (taken[label] >= want[label]) continue;
    ++taken[label];
    std::copy_n(&normalized.values[i * d], d, row.begin());
    data::WindowRecord rec;
    rec.sample_id = next_id++;
    rec.label = label;
    rec.origin = "gan";
    rec.scenario_id = -1;
    rec.features = data::denormalize(row, bounds);
    out.partition.train_ids.push_back(rec.sample_id);
    out.dataset.records.push_back(std::move(rec));
  }
  return out;
}

} // namespace stvsa::gan
