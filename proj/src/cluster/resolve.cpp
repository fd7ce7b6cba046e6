#include "stvsa/cluster/resolve.hpp"

#include <map>

namespace stvsa::cluster {

std::vector<int> resolve_labels(const ClusterAssignment &assignment,
                                const std::vector<int> &known_labels) {
  const std::size_t n = known_labels.size();
  if (assignment.hard_labels.size() != n)
    fail("shape", "assignment size does not match label count");
  if (!assignment.feasible)
    fail("infeasible", "cannot resolve labels from an infeasible clustering");

  std::map<int, std::map<int, std::size_t>> votes; // cluster -> class -> count
  std::map<int, std::size_t> members;
  for (std::size_t j = 0; j < n; ++j) {
    ++members[assignment.hard_labels[j]];
    if (known_labels[j] >= 0)
      ++votes[assignment.hard_labels[j]][known_labels[j]];
  }

  std::map<int, int> cluster_class;
  for (const auto &[cluster, count] : members) {
    auto it = votes.find(cluster);
    if (it == votes.end() || it->second.empty())
      fail("data", "cluster " + std::to_string(cluster) +
                     " has no known labels; enlarge the labeled seed set");
    int best_class = -1;
    std::size_t best = 0;
    bool tie = false;
    for (const auto &[cls, cnt] : it->second) {
      if (cnt > best) {
        best = cnt;
        best_class = cls;
        tie = false;
      } else if (cnt == best) {
        tie = true;
      }
    }
    if (tie)
      fail("data", "cluster " + std::to_string(cluster) +
                     " has a tied label vote; cannot resolve");
    cluster_class[cluster] = best_class;
  }

  std::vector<int> out(n);
  for (std::size_t j = 0; j < n; ++j)
    out[j] = known_labels[j] >= 0 ? known_labels[j]
                                  : cluster_class[assignment.hard_labels[j]];
  return out;
}

} // namespace stvsa::cluster
