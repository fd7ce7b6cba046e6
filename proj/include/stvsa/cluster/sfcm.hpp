#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "stvsa/numerics/array.hpp"

namespace stvsa::cluster {

/// State of a semi-supervised fuzzy c-means run: membership matrix U (c x N),
/// centers V, supervision matrix F (one-hot columns for labeled samples),
/// labeled flags b, scaling factor alpha. Fuzzifier is fixed at 2.
struct FuzzyState {
  num::DenseArray memberships;     // [c, N], columns on the simplex
  num::DenseArray centers;         // [c, m]
  num::DenseArray supervision;     // [c, N]
  std::vector<int> labeled_flags;  // N entries in {0, 1}
  double alpha = 1.0;
};

struct ClusterAssignment {
  std::vector<int> hard_labels;        // argmax membership per sample
  std::vector<double> objective_trace; // objective after each iteration
  int iterations = 0;
  double objective = 0.0;
  bool feasible = true;
};

struct SfcmOptions {
  int clusters = 2;
  double alpha = 1.0;
  double tol = 1e-6;
  int max_iter = 300;
  std::uint64_t seed = 1;
};

struct SfcmResult {
  FuzzyState state;
  ClusterAssignment assignment;
};

/// Alternating optimization of the fuzzy objective
///   J = sum_ij u_ij^2 d_ij^2 + alpha * sum_ij (u_ij - f_ij b_j)^2 d_ij^2
/// with closed-form membership and center updates, until |dJ| < tol or
/// max_iter. known_labels holds a class index in [0, clusters) for labeled
/// samples and -1 otherwise; with alpha = 0 this reduces to unconstrained
/// fuzzy c-means.
SfcmResult sfcm_fit(const num::DenseArray &features,
                    const std::vector<int> &known_labels,
                    const SfcmOptions &options);

} // namespace stvsa::cluster
