#pragma once

#include <vector>

#include "stvsa/numerics/array.hpp"

namespace stvsa::cluster {

/// Mean over samples of (b_j - a_j) / max(a_j, b_j), where a_j is the mean
/// distance to the other members of the sample's own cluster (0 for a
/// singleton) and b_j is the smallest mean distance to any other cluster.
/// Result lies in [-1, 1]. Requires at least two non-empty clusters.
double silhouette(const num::DenseArray &features,
                  const std::vector<int> &hard_labels);

/// Same, over a precomputed symmetric distance matrix [N, N].
double silhouette_from_distances(const num::DenseArray &distances,
                                 const std::vector<int> &hard_labels);

} // namespace stvsa::cluster
