#include "stvsa/cluster/sfcm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

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

// Squared distances from every sample to every center, [c, N].
void distances_into(const num::DenseArray &x, const num::DenseArray &centers,
                    num::DenseArray &d2) {
  const std::size_t n = x.shape[0], m = x.shape[1], c = centers.shape[0];
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < n; ++j)
      d2.at(i, j) =
        sq_distance(&x.values[j * m], &centers.values[i * m], m);
}

// Farthest-point seeding for clusters with no labeled centroid.
std::vector<std::size_t> farthest_points(const num::DenseArray &x,
                                         const std::vector<std::size_t> &fixed,
                                         std::size_t count,
                                         std::uint64_t seed) {
  const std::size_t n = x.shape[0], m = x.shape[1];
  std::vector<std::size_t> chosen = fixed;
  num::Rng rng(seed);
  if (chosen.empty()) chosen.push_back(rng.below(n));
  while (chosen.size() < fixed.size() + count) {
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < n; ++j) {
      double nearest = std::numeric_limits<double>::max();
      for (std::size_t k : chosen)
        nearest = std::min(nearest, sq_distance(&x.values[j * m],
                                                &x.values[k * m], m));
      if (nearest > best) {
        best = nearest;
        best_j = j;
      }
    }
    chosen.push_back(best_j);
  }
  chosen.erase(chosen.begin(), chosen.begin() + fixed.size());
  return chosen;
}

} // namespace

SfcmResult sfcm_fit(const num::DenseArray &features,
                    const std::vector<int> &known_labels,
                    const SfcmOptions &options) {
  if (features.rank() != 2) fail("shape", "sfcm features must be an N x m matrix");
  const std::size_t n = features.shape[0], m = features.shape[1];
  const std::size_t c = static_cast<std::size_t>(options.clusters);
  if (c < 2) fail("config", "sfcm needs at least 2 clusters");
  if (n < c) fail("data", "sfcm needs at least as many samples as clusters");
  if (known_labels.size() != n)
    fail("shape", "known label count does not match sample count");
  if (options.alpha < 0.0) fail("config", "alpha must be >= 0");

  // All points identical cannot be clustered.
  {
    bool any_diff = false;
    for (std::size_t j = m; j < n * m && !any_diff; ++j)
      if (features.values[j] != features.values[j % m]) any_diff = true;
    if (!any_diff) fail("data", "all points identical, clustering undefined");
  }

  FuzzyState st;
  st.alpha = options.alpha;
  st.memberships = num::DenseArray({c, n});
  st.supervision = num::DenseArray({c, n});
  st.labeled_flags.assign(n, 0);

  std::vector<std::size_t> labeled_per_class(c, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const int k = known_labels[j];
    if (k < 0) continue;
    if (k >= static_cast<int>(c))
      fail("data", "known label " + std::to_string(k) +
                     " outside cluster range");
    st.labeled_flags[j] = 1;
    st.supervision.at(static_cast<std::size_t>(k), j) = 1.0;
    ++labeled_per_class[static_cast<std::size_t>(k)];
  }
  if (options.alpha > 0.0) {
    bool any_labeled = false;
    for (std::size_t v : labeled_per_class) any_labeled |= v > 0;
    if (any_labeled)
      for (std::size_t i = 0; i < c; ++i)
        if (labeled_per_class[i] == 0)
          fail("data", "supervised run needs at least one labeled sample per class");
  }

  // Centers: labeled centroid per class where available, farthest-point
  // seeding for the rest.
  st.centers = num::DenseArray({c, m});
  std::vector<std::size_t> unseeded;
  for (std::size_t i = 0; i < c; ++i) {
    if (labeled_per_class[i] > 0) {
      for (std::size_t j = 0; j < n; ++j)
        if (known_labels[j] == static_cast<int>(i))
          for (std::size_t k = 0; k < m; ++k)
            st.centers.at(i, k) += features.at(j, k);
      for (std::size_t k = 0; k < m; ++k)
        st.centers.at(i, k) /= static_cast<double>(labeled_per_class[i]);
    } else {
      unseeded.push_back(i);
    }
  }
  if (!unseeded.empty()) {
    std::vector<std::size_t> fixed;
    for (std::size_t j = 0; j < n; ++j)
      if (known_labels[j] >= 0) fixed.push_back(j);
    auto extra = farthest_points(features, fixed, unseeded.size(), options.seed);
    for (std::size_t i = 0; i < unseeded.size(); ++i)
      for (std::size_t k = 0; k < m; ++k)
        st.centers.at(unseeded[i], k) = features.at(extra[i], k);
  }

  num::DenseArray d2({c, n});
  ClusterAssignment asg;
  double prev_obj = std::numeric_limits<double>::max();

  const double alpha = options.alpha;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    distances_into(features, st.centers, d2);

    // Membership update: closed-form constrained minimizer for fuzzifier 2.
    for (std::size_t j = 0; j < n; ++j) {
      // Coincident point: all membership on the zero-distance centers.
      std::size_t zero_count = 0;
      for (std::size_t i = 0; i < c; ++i)
        if (d2.at(i, j) == 0.0) ++zero_count;
      if (zero_count > 0) {
        for (std::size_t i = 0; i < c; ++i)
          st.memberships.at(i, j) =
            d2.at(i, j) == 0.0 ? 1.0 / static_cast<double>(zero_count) : 0.0;
        continue;
      }
      double inv_sum = 0.0;
      for (std::size_t i = 0; i < c; ++i) inv_sum += 1.0 / d2.at(i, j);
      double f_sum = 0.0;
      if (st.labeled_flags[j])
        for (std::size_t i = 0; i < c; ++i) f_sum += st.supervision.at(i, j);
      const double top = 1.0 + alpha * (1.0 - f_sum);
      for (std::size_t i = 0; i < c; ++i) {
        const double fcm_term = top / (d2.at(i, j) * inv_sum);
        const double sup_term =
          st.labeled_flags[j] ? alpha * st.supervision.at(i, j) : 0.0;
        st.memberships.at(i, j) = (fcm_term + sup_term) / (1.0 + alpha);
      }
    }

    // Center update from the stationary point of the objective, including
    // the supervision-weighted term.
    for (std::size_t i = 0; i < c; ++i) {
      double denom = 0.0;
      std::vector<double> numer(m, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double u = st.memberships.at(i, j);
        const double fb =
          st.labeled_flags[j] ? st.supervision.at(i, j) : 0.0;
        const double w = u * u + alpha * (u - fb) * (u - fb);
        denom += w;
        for (std::size_t k = 0; k < m; ++k)
          numer[k] += w * features.at(j, k);
      }
      if (denom > 0.0)
        for (std::size_t k = 0; k < m; ++k)
          st.centers.at(i, k) = numer[k] / denom;
    }

    // Objective with the updated state.
    distances_into(features, st.centers, d2);
    double obj = 0.0;
    for (std::size_t i = 0; i < c; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double u = st.memberships.at(i, j);
        const double fb =
          st.labeled_flags[j] ? st.supervision.at(i, j) : 0.0;
        obj += u * u * d2.at(i, j) + alpha * (u - fb) * (u - fb) * d2.at(i, j);
      }
    asg.objective_trace.push_back(obj);
    asg.iterations = iter + 1;
    if (std::abs(prev_obj - obj) < options.tol) {
      prev_obj = obj;
      break;
    }
    prev_obj = obj;
  }
  asg.objective = prev_obj;

  asg.hard_labels.assign(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < c; ++i)
      if (st.memberships.at(i, j) > st.memberships.at(best, j)) best = i;
    asg.hard_labels[j] = static_cast<int>(best);
  }

  return SfcmResult{std::move(st), std::move(asg)};
}

} // namespace stvsa::cluster
