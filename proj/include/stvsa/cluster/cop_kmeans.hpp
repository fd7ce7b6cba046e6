#pragma once

#include <cstdint>
#include <vector>

#include "stvsa/cluster/sfcm.hpp"

namespace stvsa::cluster {

struct CopKmeansOptions {
  int clusters = 2;
  int max_iter = 100;
  std::uint64_t seed = 1;
};

/// Constraint-partitioning k-means. Pairwise constraints are derived from the
/// partial labels: samples sharing a label must land in the same cluster,
/// samples with different labels must not. With no labels this is plain
/// k-means. Infeasible constraint sets are reported through
/// ClusterAssignment::feasible rather than thrown.
ClusterAssignment cop_kmeans_fit(const num::DenseArray &features,
                                 const std::vector<int> &known_labels,
                                 const CopKmeansOptions &options);

} // namespace stvsa::cluster
