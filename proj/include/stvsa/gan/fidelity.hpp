#pragma once

#include "stvsa/numerics/array.hpp"

namespace stvsa::gan {

/// Coordinate-wise 1-D Wasserstein-1 distance between the empirical
/// distributions of two sample sets [n, d] and [k, d], averaged over the d
/// features. Symmetric, nonnegative, zero on identical sets.
double wasserstein_distance(const num::DenseArray &real,
                            const num::DenseArray &generated);

/// Squared maximum mean discrepancy, biased V-statistic with a Gaussian RBF
/// kernel exp(-|x-y|^2 / (2 sigma^2)). bandwidth <= 0 selects the median
/// pairwise distance over the pooled sets.
double mmd(const num::DenseArray &real, const num::DenseArray &generated,
           double bandwidth = 0.0);

/// Frechet distance between Gaussian fits of the two sets:
/// |mu_r - mu_g|^2 + Tr[cov_r + cov_g - 2 (cov_r cov_g)^{1/2}], computed on
/// the raw flattened features. Falls back to diagonal covariances when a set
/// is smaller than dimension + 1.
double fid(const num::DenseArray &real, const num::DenseArray &generated);

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues land in `values`, eigenvectors in the columns of `vectors`.
void symmetric_eigen(const num::DenseArray &matrix, num::DenseArray &values,
                     num::DenseArray &vectors);

} // namespace stvsa::gan
