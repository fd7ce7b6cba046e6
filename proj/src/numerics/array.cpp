#include "stvsa/numerics/array.hpp"

#include <sstream>

namespace stvsa::num {

std::size_t shape_numel(const Shape &shape) {
  std::size_t n = 1;
  for (std::size_t e : shape) n *= e;
  return shape.empty() ? 0 : n;
}

std::string shape_str(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << 'x';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

void matmul_into(const DenseArray &a, const DenseArray &b, DenseArray &out) {
  const std::size_t r = a.shape[0], k = a.shape[1], c = b.shape[1];
  std::fill(out.values.begin(), out.values.end(), 0.0);
  for (std::size_t i = 0; i < r; ++i) {
    double *orow = &out.values[i * c];
    const double *arow = &a.values[i * k];
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      const double *brow = &b.values[p * c];
      for (std::size_t j = 0; j < c; ++j) orow[j] += av * brow[j];
    }
  }
}

} // namespace stvsa::num
