#pragma once

#include "tslto/random.hpp"
#include "tslto/tensor.hpp"

namespace tslto::testing {

inline Tensor3 random_tensor(const Dims& dims, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Tensor3 x(dims);
  for (Index i = 0; i < x.size(); ++i) x[i] = rng.uniform(lo, hi);
  return x;
}

inline Matrix random_matrix(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal(0.0, 1.0);
  return m;
}

inline Matrix random_orthonormal(Index rows, Index cols, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rows, cols, rng));
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

/// Entrywise Tucker product by explicit summation.
inline Tensor3 naive_tucker(const Tensor3& g, const Matrix& u1, const Matrix& u2, const Matrix& u3) {
  Tensor3 out({u1.rows(), u2.rows(), u3.rows()});
  for (Index i = 0; i < u1.rows(); ++i)
    for (Index j = 0; j < u2.rows(); ++j)
      for (Index k = 0; k < u3.rows(); ++k) {
        double acc = 0.0;
        for (Index a = 0; a < g.dims()[0]; ++a)
          for (Index b = 0; b < g.dims()[1]; ++b)
            for (Index c = 0; c < g.dims()[2]; ++c) acc += g(a, b, c) * u1(i, a) * u2(j, b) * u3(k, c);
        out(i, j, k) = acc;
      }
  return out;
}

/// Dense (n-1) x n first-difference matrix.
inline Matrix dense_difference(Index n) {
  Matrix t = Matrix::Zero(n - 1, n);
  for (Index i = 0; i + 1 < n; ++i) {
    t(i, i) = 1.0;
    t(i, i + 1) = -1.0;
  }
  return t;
}

}  // namespace tslto::testing
