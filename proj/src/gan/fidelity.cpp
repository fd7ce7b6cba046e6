#include "stvsa/gan/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace stvsa::gan {

namespace {

void require_sets(const num::DenseArray &a, const num::DenseArray &b,
                  const char *what) {
  if (a.rank() != 2 || b.rank() != 2)
    fail("shape", std::string(what) + " expects [n, d] sample matrices");
  if (a.shape[0] == 0 || b.shape[0] == 0)
    fail("domain", std::string(what) + " requires non-empty sample sets");
  if (a.shape[1] != b.shape[1])
    fail("shape", std::string(what) + " dimension mismatch: " +
                    num::shape_str(a.shape) + " vs " + num::shape_str(b.shape));
}

// W1 between two 1-D empirical distributions via the quantile-function
// integral; handles unequal sample counts.
double w1_sorted(std::vector<double> &x, std::vector<double> &y) {
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const std::size_t n = x.size(), k = y.size();
  std::size_t i = 0, j = 0;
  double p = 0.0, total = 0.0;
  while (i < n && j < k) {
    const double px = static_cast<double>(i + 1) / n;
    const double py = static_cast<double>(j + 1) / k;
    const double q = std::min(px, py);
    total += (q - p) * std::abs(x[i] - y[j]);
    p = q;
    if (px <= q + 1e-15) ++i;
    if (py <= q + 1e-15) ++j;
  }
  return total;
}

double sq_norm(const double *a, const double *b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

} // namespace

double wasserstein_distance(const num::DenseArray &real,
                            const num::DenseArray &generated) {
  require_sets(real, generated, "wasserstein_distance");
  const std::size_t d = real.shape[1];
  double total = 0.0;
  std::vector<double> x(real.shape[0]), y(generated.shape[0]);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = real.at(i, j);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = generated.at(i, j);
    total += w1_sorted(x, y);
  }
  return total / static_cast<double>(d);
}

double mmd(const num::DenseArray &real, const num::DenseArray &generated,
           double bandwidth) {
  require_sets(real, generated, "mmd");
  const std::size_t n = real.shape[0], k = generated.shape[0],
                    d = real.shape[1];

  double sigma = bandwidth;
  if (sigma <= 0.0) {
    // Median pairwise distance over the pooled set.
    std::vector<const double *> rows;
    rows.reserve(n + k);
    for (std::size_t i = 0; i < n; ++i) rows.push_back(&real.values[i * d]);
    for (std::size_t i = 0; i < k; ++i)
      rows.push_back(&generated.values[i * d]);
    std::vector<double> dists;
    dists.reserve(rows.size() * (rows.size() - 1) / 2);
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j)
        dists.push_back(std::sqrt(sq_norm(rows[i], rows[j], d)));
    if (dists.empty()) return 0.0;
    auto mid = dists.begin() + dists.size() / 2;
    std::nth_element(dists.begin(), mid, dists.end());
    sigma = *mid;
    if (sigma <= 0.0) sigma = 1.0;
  }
  const double inv = 1.0 / (2.0 * sigma * sigma);
  auto kernel_sum = [&](const num::DenseArray &a, const num::DenseArray &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.shape[0]; ++i)
      for (std::size_t j = 0; j < b.shape[0]; ++j)
        s += std::exp(-sq_norm(&a.values[i * d], &b.values[j * d], d) * inv);
    return s;
  };
  const double krr = kernel_sum(real, real) / (static_cast<double>(n) * n);
  const double kgg = kernel_sum(generated, generated) /
                     (static_cast<double>(k) * k);
  const double krg = kernel_sum(real, generated) /
                     (static_cast<double>(n) * k);
  return krr - 2.0 * krg + kgg;
}

void symmetric_eigen(const num::DenseArray &matrix, num::DenseArray &values,
                     num::DenseArray &vectors) {
  if (matrix.rank() != 2 || matrix.shape[0] != matrix.shape[1])
    fail("shape", "symmetric_eigen expects a square matrix");
  const std::size_t d = matrix.shape[0];
  num::DenseArray a = matrix;
  vectors = num::DenseArray({d, d});
  for (std::size_t i = 0; i < d; ++i) vectors.at(i, i) = 1.0;

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) off += a.at(p, q) * a.at(p, q);
    if (off < 1e-24) break;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t i = 0; i < d; ++i) {
          const double aip = a.at(i, p), aiq = a.at(i, q);
          a.at(i, p) = c * aip - s * aiq;
          a.at(i, q) = s * aip + c * aiq;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double api = a.at(p, i), aqi = a.at(q, i);
          a.at(p, i) = c * api - s * aqi;
          a.at(q, i) = s * api + c * aqi;
        }
        for (std::size_t i = 0; i < d; ++i) {
          const double vip = vectors.at(i, p), viq = vectors.at(i, q);
          vectors.at(i, p) = c * vip - s * viq;
          vectors.at(i, q) = s * vip + c * viq;
        }
      }
  }
  values = num::DenseArray({d});
  for (std::size_t i = 0; i < d; ++i) values.values[i] = a.at(i, i);
}

namespace {

constexpr double kPsdTolerance = 1e-6;

void mean_and_cov(const num::DenseArray &x, std::vector<double> &mean,
                  num::DenseArray &cov, bool diagonal) {
  const std::size_t n = x.shape[0], d = x.shape[1];
  mean.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x.at(i, j);
  for (double &v : mean) v /= static_cast<double>(n);

  cov = num::DenseArray({d, d});
  if (n < 2) return;
  const double denom = static_cast<double>(n - 1);
  if (diagonal) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < d; ++j) {
        const double c = x.at(i, j) - mean[j];
        cov.at(j, j) += c * c / denom;
      }
    return;
  }
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = x.at(i, j) - mean[j];
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b)
        cov.at(a, b) += centered[a] * centered[b] / denom;
  }
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < a; ++b) cov.at(a, b) = cov.at(b, a);
}

// Symmetric PSD square root via eigendecomposition; small negative
// eigenvalues are clipped at zero, anything below -kPsdTolerance rejects.
num::DenseArray psd_sqrt(const num::DenseArray &m) {
  num::DenseArray evals, evecs;
  symmetric_eigen(m, evals, evecs);
  const std::size_t d = m.shape[0];
  for (double &v : evals.values) {
    if (v < -kPsdTolerance)
      fail("domain", "covariance is not positive semidefinite (eigenvalue " +
                       std::to_string(v) + ")");
    v = v > 0.0 ? std::sqrt(v) : 0.0;
  }
  num::DenseArray out({d, d});
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k)
        s += evecs.at(i, k) * evals.values[k] * evecs.at(j, k);
      out.at(i, j) = s;
    }
  return out;
}

} // namespace

double fid(const num::DenseArray &real, const num::DenseArray &generated) {
  require_sets(real, generated, "fid");
  const std::size_t d = real.shape[1];
  const bool diagonal =
    real.shape[0] < d + 1 || generated.shape[0] < d + 1;

  std::vector<double> mu_r, mu_g;
  num::DenseArray cov_r, cov_g;
  mean_and_cov(real, mu_r, cov_r, diagonal);
  mean_and_cov(generated, mu_g, cov_g, diagonal);

  double mean_term = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = mu_r[j] - mu_g[j];
    mean_term += diff * diff;
  }

  if (diagonal) {
    double trace = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double vr = std::max(cov_r.at(j, j), 0.0);
      const double vg = std::max(cov_g.at(j, j), 0.0);
      trace += vr + vg - 2.0 * std::sqrt(vr * vg);
    }
    return mean_term + trace;
  }

  // Tr[(cov_r cov_g)^{1/2}] through the symmetric form
  // S = cov_r^{1/2} cov_g cov_r^{1/2}.
  num::DenseArray sr = psd_sqrt(cov_r);
  num::DenseArray tmp({d, d}), s({d, d});
  num::matmul_into(sr, cov_g, tmp);
  num::matmul_into(tmp, sr, s);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) {
      const double avg = 0.5 * (s.at(i, j) + s.at(j, i));
      s.at(i, j) = s.at(j, i) = avg;
    }
  num::DenseArray evals, evecs;
  symmetric_eigen(s, evals, evecs);
  double trace_sqrt = 0.0;
  for (double v : evals.values) {
    if (v < -kPsdTolerance)
      fail("domain", "cross-covariance product is not PSD within tolerance");
    trace_sqrt += v > 0.0 ? std::sqrt(v) : 0.0;
  }
  double trace_r = 0.0, trace_g = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    trace_r += cov_r.at(j, j);
    trace_g += cov_g.at(j, j);
  }
  return mean_term + trace_r + trace_g - 2.0 * trace_sqrt;
}

} // namespace stvsa::gan
