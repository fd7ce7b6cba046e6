#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stvsa/cluster/cop_kmeans.hpp"
#include "stvsa/cluster/resolve.hpp"
#include "stvsa/cluster/sfcm.hpp"
#include "stvsa/cluster/silhouette.hpp"
#include "stvsa/numerics/rng.hpp"

using namespace stvsa;
using num::DenseArray;

namespace {

// Independent plain fuzzy c-means (fuzzifier 2) used as the oracle for the
// alpha = 0 reduction. Centers are passed in so both routes share the same
// starting point; only the update rules are re-derived here.
struct PlainFcm {
  DenseArray memberships; // [c, N]
  DenseArray centers;     // [c, m]
};

PlainFcm plain_fcm(const DenseArray &x, DenseArray centers, int iters) {
  const std::size_t n = x.shape[0], m = x.shape[1], c = centers.shape[0];
  PlainFcm f;
  f.centers = std::move(centers);
  f.memberships = DenseArray({c, n});
  for (int it = 0; it < iters; ++it) {
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> d2(c);
      bool zero = false;
      for (std::size_t i = 0; i < c; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          const double d = x.at(j, k) - f.centers.at(i, k);
          s += d * d;
        }
        d2[i] = s;
        zero |= s == 0.0;
      }
      for (std::size_t i = 0; i < c; ++i) {
        if (zero) {
          f.memberships.at(i, j) = d2[i] == 0.0 ? 1.0 : 0.0;
        } else {
          double sum = 0.0;
          for (std::size_t k = 0; k < c; ++k) sum += d2[i] / d2[k];
          f.memberships.at(i, j) = 1.0 / sum;
        }
      }
    }
    for (std::size_t i = 0; i < c; ++i) {
      double denom = 0.0;
      std::vector<double> numer(m, 0.0);
      for (std::size_t j = 0; j < n; ++j) {
        const double u2 = f.memberships.at(i, j) * f.memberships.at(i, j);
        denom += u2;
        for (std::size_t k = 0; k < m; ++k) numer[k] += u2 * x.at(j, k);
      }
      for (std::size_t k = 0; k < m; ++k) f.centers.at(i, k) = numer[k] / denom;
    }
  }
  return f;
}

// Two Gaussian blobs in 2-D with a fraction of known labels.
struct Blobs {
  DenseArray features;
  std::vector<int> truth;
  std::vector<int> known;
};

Blobs make_blobs(std::size_t per_class, double labeled_fraction,
                 std::uint64_t seed, double separation = 6.0) {
  num::Rng rng(seed);
  Blobs b;
  b.features = DenseArray({2 * per_class, 2});
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int cls = i < per_class ? 0 : 1;
    const double cx = cls == 0 ? 0.0 : separation;
    b.features.at(i, 0) = cx + rng.normal(0.0, 1.0);
    b.features.at(i, 1) = rng.normal(0.0, 1.0);
    b.truth.push_back(cls);
    b.known.push_back(rng.uniform() < labeled_fraction ? cls : -1);
  }
  if (labeled_fraction > 0.0) {
    b.known[0] = 0;
    b.known[per_class] = 1;
  }
  return b;
}

} // namespace

TEST_CASE("sfcm with alpha 0 matches the plain fcm oracle") {
  Blobs b = make_blobs(10, 0.0, 3);
  cluster::SfcmOptions opts;
  opts.clusters = 2;
  opts.alpha = 0.0;
  opts.tol = 0.0; // run a fixed number of iterations on both routes
  opts.max_iter = 40;
  opts.seed = 9;
  cluster::SfcmResult got = cluster::sfcm_fit(b.features, b.known, opts);

  // The oracle starts from the same farthest-point centers; reproduce them
  // by running sfcm for zero iterations is not exposed, so instead run the
  // oracle from the converged centers: at a fixed point both formulations
  // agree, so one more oracle sweep must not move the memberships.
  PlainFcm oracle = plain_fcm(b.features, got.state.centers, 1);
  for (std::size_t i = 0; i < got.state.memberships.numel(); ++i)
    CHECK(std::abs(oracle.memberships.values[i] -
                   got.state.memberships.values[i]) < 1e-8);
}

TEST_CASE("sfcm membership columns stay on the simplex") {
  Blobs b = make_blobs(30, 0.2, 5);
  cluster::SfcmOptions opts;
  opts.alpha = 1.0;
  cluster::SfcmResult r = cluster::sfcm_fit(b.features, b.known, opts);
  const std::size_t n = b.truth.size();
  for (std::size_t j = 0; j < n; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      const double u = r.state.memberships.at(i, j);
      CHECK(u >= -1e-12);
      CHECK(u <= 1.0 + 1e-12);
      sum += u;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("sfcm objective is non-increasing") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Blobs b = make_blobs(25, 0.15, seed, 4.0);
    cluster::SfcmOptions opts;
    opts.alpha = 1.0;
    cluster::SfcmResult r = cluster::sfcm_fit(b.features, b.known, opts);
    const auto &trace = r.assignment.objective_trace;
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i)
      CHECK(trace[i] <= trace[i - 1] + 1e-9);
  }
}

TEST_CASE("sfcm equidistant unlabeled point gets half membership") {
  // two labeled anchors fix the centers, probe point is equidistant
  DenseArray x({5, 1});
  x.values = {-1.0, -1.0, 1.0, 1.0, 0.0};
  std::vector<int> known{0, 0, 1, 1, -1};
  cluster::SfcmOptions opts;
  opts.alpha = 0.0;
  opts.max_iter = 100;
  cluster::SfcmResult r = cluster::sfcm_fit(x, known, opts);
  CHECK(r.state.memberships.at(0, 4) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.state.memberships.at(1, 4) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("sfcm labeled points follow their labels on separated blobs") {
  Blobs b = make_blobs(100, 0.10, 17);
  cluster::SfcmOptions opts;
  opts.alpha = 1.0;
  cluster::SfcmResult r = cluster::sfcm_fit(b.features, b.known, opts);
  std::size_t labeled = 0, matching = 0;
  for (std::size_t j = 0; j < b.truth.size(); ++j) {
    if (b.known[j] < 0) continue;
    ++labeled;
    if (r.assignment.hard_labels[j] == b.known[j]) ++matching;
  }
  REQUIRE(labeled > 0);
  CHECK(static_cast<double>(matching) / labeled >= 0.95);
}

TEST_CASE("sfcm with large alpha pins every labeled point") {
  Blobs b = make_blobs(40, 0.3, 23, 3.0);
  cluster::SfcmOptions opts;
  opts.alpha = 100.0;
  cluster::SfcmResult r = cluster::sfcm_fit(b.features, b.known, opts);
  for (std::size_t j = 0; j < b.truth.size(); ++j)
    if (b.known[j] >= 0) CHECK(r.assignment.hard_labels[j] == b.known[j]);
}

TEST_CASE("sfcm is invariant to feature translation") {
  Blobs b = make_blobs(30, 0.2, 29);
  cluster::SfcmOptions opts;
  opts.alpha = 1.0;
  cluster::SfcmResult base = cluster::sfcm_fit(b.features, b.known, opts);

  DenseArray shifted = b.features;
  for (std::size_t i = 0; i < shifted.shape[0]; ++i) {
    shifted.at(i, 0) += 123.0;
    shifted.at(i, 1) -= 45.0;
  }
  cluster::SfcmResult moved = cluster::sfcm_fit(shifted, b.known, opts);
  for (std::size_t i = 0; i < base.state.memberships.numel(); ++i)
    CHECK(std::abs(base.state.memberships.values[i] -
                   moved.state.memberships.values[i]) < 1e-9);
}

TEST_CASE("sfcm rejects bad inputs") {
  DenseArray same({4, 2});
  same.fill(1.0);
  cluster::SfcmOptions opts;
  CHECK_THROWS_AS(cluster::sfcm_fit(same, {-1, -1, -1, -1}, opts), Error);

  Blobs b = make_blobs(5, 0.0, 1);
  opts.alpha = 1.0;
  std::vector<int> one_sided(b.truth.size(), -1);
  one_sided[0] = 0; // only class 0 labeled
  CHECK_THROWS_AS(cluster::sfcm_fit(b.features, one_sided, opts), Error);
}

TEST_CASE("silhouette on the four-point instance") {
  // {0, 0.1} vs {10, 10.1}: outer points have a = 0.1 and b = 10.05, inner
  // points a = 0.1 and b = 9.95; the score is the mean of the four ratios.
  DenseArray x({4, 1});
  x.values = {0.0, 0.1, 10.0, 10.1};
  const double expected =
    0.5 * ((10.05 - 0.1) / 10.05 + (9.95 - 0.1) / 9.95);
  CHECK(cluster::silhouette(x, {0, 0, 1, 1}) ==
        doctest::Approx(expected).epsilon(1e-9));
  CHECK(expected == doctest::Approx(0.990).epsilon(1e-3));
}

TEST_CASE("silhouette of interleaved identical-centroid clusters is <= 0") {
  // alternating points assigned to the wrong side
  DenseArray x({8, 1});
  x.values = {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
  std::vector<int> interleaved{0, 1, 0, 1, 0, 1, 0, 1};
  CHECK(cluster::silhouette(x, interleaved) <= 0.0);
}

TEST_CASE("silhouette of perfectly duplicated clusters is 1") {
  DenseArray x({4, 2});
  x.values = {0, 0, 0, 0, 5, 5, 5, 5};
  // each cluster holds two coincident points, a = 0, b > 0
  CHECK(cluster::silhouette(x, {0, 0, 1, 1}) == doctest::Approx(1.0));
}

TEST_CASE("silhouette stays within [-1, 1] and rejects one cluster") {
  num::Rng rng(31);
  for (int rep = 0; rep < 20; ++rep) {
    DenseArray x({12, 3});
    for (double &v : x.values) v = rng.uniform(-5, 5);
    std::vector<int> labels(12);
    for (int &l : labels) l = static_cast<int>(rng.below(3));
    // ensure at least two clusters are populated
    labels[0] = 0;
    labels[1] = 1;
    const double sc = cluster::silhouette(x, labels);
    CHECK(sc >= -1.0);
    CHECK(sc <= 1.0);
  }
  DenseArray x({3, 1});
  x.values = {1, 2, 3};
  CHECK_THROWS_AS(cluster::silhouette(x, {0, 0, 0}), Error);
}

TEST_CASE("cop-kmeans without labels is plain k-means on blobs") {
  Blobs b = make_blobs(40, 0.0, 37);
  cluster::CopKmeansOptions opts;
  opts.seed = 4;
  cluster::ClusterAssignment r =
    cluster::cop_kmeans_fit(b.features, b.known, opts);
  REQUIRE(r.feasible);
  // blobs are well separated: clustering must recover them up to relabeling
  int agree = 0;
  for (std::size_t j = 0; j < b.truth.size(); ++j)
    if (r.hard_labels[j] == b.truth[j]) ++agree;
  const int n = static_cast<int>(b.truth.size());
  CHECK((agree == n || agree == 0));
}

TEST_CASE("cop-kmeans separates labeled points of different classes") {
  // two nearly coincident points with different labels, plus far anchors
  DenseArray x({6, 1});
  x.values = {0.0, 0.05, 10.0, 10.05, 0.02, 10.02};
  std::vector<int> known{0, 1, -1, -1, -1, -1};
  cluster::CopKmeansOptions opts;
  opts.seed = 8;
  cluster::ClusterAssignment r = cluster::cop_kmeans_fit(x, known, opts);
  REQUIRE(r.feasible);
  CHECK(r.hard_labels[0] != r.hard_labels[1]);
}

TEST_CASE("cop-kmeans with full consistent labels recovers them") {
  Blobs b = make_blobs(30, 1.0, 41);
  cluster::CopKmeansOptions opts;
  opts.seed = 2;
  cluster::ClusterAssignment r =
    cluster::cop_kmeans_fit(b.features, b.known, opts);
  REQUIRE(r.feasible);
  // clusters must coincide with the label groups exactly
  for (std::size_t j = 1; j < b.truth.size(); ++j) {
    if (b.truth[j] == b.truth[0])
      CHECK(r.hard_labels[j] == r.hard_labels[0]);
    else
      CHECK(r.hard_labels[j] != r.hard_labels[0]);
  }
}

TEST_CASE("cop-kmeans reports infeasibility") {
  DenseArray x({4, 1});
  x.values = {0, 1, 2, 3};
  std::vector<int> known{0, 1, 2, -1}; // three classes, two clusters
  cluster::CopKmeansOptions opts;
  cluster::ClusterAssignment r = cluster::cop_kmeans_fit(x, known, opts);
  CHECK_FALSE(r.feasible);
}

TEST_CASE("resolve_labels majority vote and guards") {
  cluster::ClusterAssignment a;
  a.hard_labels = {0, 0, 0, 1, 1};
  a.feasible = true;

  // majority in cluster 0 is class 1; known labels kept
  std::vector<int> known{1, 1, -1, 0, -1};
  std::vector<int> resolved = cluster::resolve_labels(a, known);
  CHECK(resolved == std::vector<int>{1, 1, 1, 0, 0});

  // cluster without a known label rejects
  std::vector<int> empty_cluster{1, 1, -1, -1, -1};
  CHECK_THROWS_AS(cluster::resolve_labels(a, empty_cluster), Error);

  // tied vote rejects
  cluster::ClusterAssignment t;
  t.hard_labels = {0, 0, 1};
  t.feasible = true;
  std::vector<int> tied{0, 1, 0};
  CHECK_THROWS_AS(cluster::resolve_labels(t, tied), Error);

  // known label conflicting with the majority survives
  cluster::ClusterAssignment c;
  c.hard_labels = {0, 0, 0, 1};
  c.feasible = true;
  std::vector<int> conflict{1, 1, 0, 0};
  std::vector<int> out = cluster::resolve_labels(c, conflict);
  CHECK(out[2] == 0); // kept, not overwritten by the majority
  CHECK(out[0] == 1);
}
