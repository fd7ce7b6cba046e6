#include "stvsa/cluster/silhouette.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace stvsa::cluster {

double silhouette_from_distances(const num::DenseArray &distances,
                                 const std::vector<int> &hard_labels) {
  const std::size_t n = hard_labels.size();
  if (distances.rank() != 2 || distances.shape[0] != n ||
      distances.shape[1] != n)
    fail("shape", "distance matrix must be N x N");

  std::map<int, std::size_t> cluster_sizes;
  for (int l : hard_labels) ++cluster_sizes[l];
  if (cluster_sizes.size() < 2)
    fail("data", "silhouette requires at least two clusters");
  for (const auto &[label, count] : cluster_sizes)
    if (count == 0) fail("data", "empty cluster in silhouette input");

  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const int own = hard_labels[j];
    std::map<int, double> sum;
    std::map<int, std::size_t> cnt;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) continue;
      sum[hard_labels[k]] += distances.at(j, k);
      ++cnt[hard_labels[k]];
    }
    const double a = cnt.count(own) ? sum[own] / cnt[own] : 0.0;
    double b = std::numeric_limits<double>::max();
    for (const auto &[label, count] : cnt)
      if (label != own) b = std::min(b, sum[label] / count);
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

double silhouette(const num::DenseArray &features,
                  const std::vector<int> &hard_labels) {
  if (features.rank() != 2 || features.shape[0] != hard_labels.size())
    fail("shape", "features must be N x m with one label per row");
  const std::size_t n = features.shape[0], m = features.shape[1];
  num::DenseArray d({n, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        const double diff = features.at(i, k) - features.at(j, k);
        s += diff * diff;
      }
      d.at(i, j) = d.at(j, i) = std::sqrt(s);
    }
  return silhouette_from_distances(d, hard_labels);
}

} // namespace stvsa::cluster
