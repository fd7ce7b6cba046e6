#pragma once

#include <vector>

#include "stvsa/cluster/sfcm.hpp"

namespace stvsa::cluster {

/// Maps clusters onto classes by majority vote of the known labels inside
/// each cluster, then assigns every sample the class of its cluster. Known
/// labels are never overwritten. A cluster without any known label, or with
/// a tied vote, is rejected.
std::vector<int> resolve_labels(const ClusterAssignment &assignment,
                                const std::vector<int> &known_labels);

} // namespace stvsa::cluster
