#include "stvsa/cluster/cop_kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "stvsa/numerics/rng.hpp"

namespace stvsa::cluster {

namespace {

double sq_distance(const double *a, const double *b, std::size_t m) {
  double s = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

// k-means++ style seeding.
std::vector<std::size_t> seed_centers(const num::DenseArray &x, std::size_t c,
                                      std::uint64_t seed) {
  const std::size_t n = x.shape[0], m = x.shape[1];
  num::Rng rng(seed);
  std::vector<std::size_t> chosen{rng.below(n)};
  while (chosen.size() < c) {
    std::vector<double> d2(n);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double nearest = std::numeric_limits<double>::max();
      for (std::size_t k : chosen)
        nearest =
          std::min(nearest, sq_distance(&x.values[j * m], &x.values[k * m], m));
      d2[j] = nearest;
      total += nearest;
    }
    if (total == 0.0) {
      chosen.push_back(rng.below(n));
      continue;
    }
    double pick = rng.uniform() * total;
    std::size_t j = 0;
    for (; j + 1 < n && pick > d2[j]; ++j) pick -= d2[j];
    chosen.push_back(j);
  }
  return chosen;
}

} // namespace

ClusterAssignment cop_kmeans_fit(const num::DenseArray &features,
                                 const std::vector<int> &known_labels,
                                 const CopKmeansOptions &options) {
  if (features.rank() != 2)
    fail("shape", "cop_kmeans features must be an N x m matrix");
  const std::size_t n = features.shape[0], m = features.shape[1];
  const std::size_t c = static_cast<std::size_t>(options.clusters);
  if (c < 2) fail("config", "cop_kmeans needs at least 2 clusters");
  if (n < c) fail("data", "cop_kmeans needs at least as many samples as clusters");
  if (known_labels.size() != n)
    fail("shape", "known label count does not match sample count");

  std::set<int> classes;
  for (int l : known_labels)
    if (l >= 0) classes.insert(l);

  ClusterAssignment asg;
  if (classes.size() > c) {
    // More must-link groups than clusters: cannot satisfy the cannot-links.
    asg.feasible = false;
    return asg;
  }

  num::DenseArray centers({c, m});
  auto seeds = seed_centers(features, c, options.seed);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t k = 0; k < m; ++k)
      centers.at(i, k) = features.at(seeds[i], k);

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < options.max_iter; ++iter) {
    // Assignment pass. Labeled samples of one class form a must-link group;
    // the first of them to be placed designates the group's cluster, and no
    // other class may use that cluster.
    std::map<int, int> cluster_of_class;
    std::vector<int> class_of_cluster(c, -1);
    std::vector<int> next(n, -1);
    bool feasible = true;

    for (std::size_t j = 0; j < n && feasible; ++j) {
      const int cls = known_labels[j];
      if (cls >= 0 && cluster_of_class.count(cls)) {
        next[j] = cluster_of_class[cls];
        continue;
      }
      // Order clusters by distance and take the first admissible one.
      std::vector<std::pair<double, int>> order;
      for (std::size_t i = 0; i < c; ++i)
        order.emplace_back(
          sq_distance(&features.values[j * m], &centers.values[i * m], m),
          static_cast<int>(i));
      std::sort(order.begin(), order.end());
      int placed = -1;
      for (const auto &[dist, i] : order) {
        if (cls >= 0 && class_of_cluster[i] >= 0 && class_of_cluster[i] != cls)
          continue; // cannot-link with the class already owning this cluster
        placed = i;
        break;
      }
      if (placed < 0) {
        feasible = false;
        break;
      }
      next[j] = placed;
      if (cls >= 0) {
        cluster_of_class[cls] = placed;
        class_of_cluster[placed] = cls;
      }
    }
    if (!feasible) {
      asg.feasible = false;
      return asg;
    }

    // Update centers.
    num::DenseArray sums({c, m});
    std::vector<std::size_t> counts(c, 0);
    for (std::size_t j = 0; j < n; ++j) {
      ++counts[static_cast<std::size_t>(next[j])];
      for (std::size_t k = 0; k < m; ++k)
        sums.at(static_cast<std::size_t>(next[j]), k) += features.at(j, k);
    }
    for (std::size_t i = 0; i < c; ++i)
      if (counts[i] > 0)
        for (std::size_t k = 0; k < m; ++k)
          centers.at(i, k) = sums.at(i, k) / static_cast<double>(counts[i]);

    asg.iterations = iter + 1;
    double sse = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      sse += sq_distance(&features.values[j * m],
                         &centers.values[static_cast<std::size_t>(next[j]) * m],
                         m);
    asg.objective_trace.push_back(sse);
    asg.objective = sse;

    if (next == assign) break;
    assign = next;
  }

  asg.hard_labels = assign;
  asg.feasible = true;
  return asg;
}

} // namespace stvsa::cluster
