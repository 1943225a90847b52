#include "tslto/tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace tslto {

namespace {

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("tensor mode must be 1, 2 or 3, got " + std::to_string(mode));
  }
}

void check_dims(const Dims& dims) {
  for (Index d : dims) {
    if (d <= 0) throw std::invalid_argument("tensor dimensions must be positive");
  }
}

std::string dims_string(const Dims& d) {
  return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

using ConstMap = Eigen::Map<const Matrix>;
using MutMap = Eigen::Map<Matrix>;

// a is m x D_n when !transposed, D_n x m when transposed.
template <bool Transposed>
Tensor3 mode_product_impl(const Tensor3& x, const Matrix& a, int mode) {
  check_mode(mode);
  const Dims& d = x.dims();
  const Index dn = d[mode - 1];
  const Index inner_dim = Transposed ? a.rows() : a.cols();
  const Index m = Transposed ? a.cols() : a.rows();
  if (inner_dim != dn) {
    throw std::invalid_argument("mode_n_product: matrix does not match mode " +
                                std::to_string(mode) + " of a " + dims_string(d) + " tensor");
  }
  Dims out_dims = d;
  out_dims[mode - 1] = m;
  Tensor3 out(out_dims);
  if (mode == 1) {
    if constexpr (Transposed) {
      out.mode1().noalias() = a.transpose() * x.mode1();
    } else {
      out.mode1().noalias() = a * x.mode1();
    }
  } else if (mode == 2) {
    for (Index i3 = 0; i3 < d[2]; ++i3) {
      ConstMap src(x.values().data() + d[0] * d[1] * i3, d[0], d[1]);
      MutMap dst(out.values().data() + d[0] * m * i3, d[0], m);
      if constexpr (Transposed) {
        dst.noalias() = src * a;
      } else {
        dst.noalias() = src * a.transpose();
      }
    }
  } else {
    ConstMap src(x.values().data(), d[0] * d[1], d[2]);
    MutMap dst(out.values().data(), d[0] * d[1], m);
    if constexpr (Transposed) {
      dst.noalias() = src * a;
    } else {
      dst.noalias() = src * a.transpose();
    }
  }
  return out;
}

}  // namespace

Tensor3::Tensor3(const Dims& dims, double fill) : dims_(dims) {
  check_dims(dims);
  values_ = Vector::Constant(dims[0] * dims[1] * dims[2], fill);
}

Tensor3::Tensor3(const Dims& dims, Vector values) : dims_(dims), values_(std::move(values)) {
  check_dims(dims);
  if (values_.size() != dims[0] * dims[1] * dims[2]) {
    throw std::invalid_argument("Tensor3: value count does not match dims " + dims_string(dims));
  }
}

Index Tensor3::dim(int mode) const {
  check_mode(mode);
  return dims_[mode - 1];
}

Tensor3& Tensor3::operator+=(const Tensor3& other) {
  require_same_dims(dims_, other.dims_, "Tensor3 +=");
  values_ += other.values_;
  return *this;
}

Tensor3& Tensor3::operator-=(const Tensor3& other) {
  require_same_dims(dims_, other.dims_, "Tensor3 -=");
  values_ -= other.values_;
  return *this;
}

ObservationMask::ObservationMask(const Dims& dims, bool observed) : dims_(dims) {
  check_dims(dims);
  flags_.assign(static_cast<std::size_t>(dims[0] * dims[1] * dims[2]), observed ? 1 : 0);
}

ObservationMask ObservationMask::from_nonzeros(const Tensor3& x) {
  ObservationMask mask(x.dims());
  for (Index i = 0; i < x.size(); ++i) mask.set(i, x[i] != 0.0);
  return mask;
}

void ObservationMask::set(Index i1, Index i2, Index i3, bool observed) {
  if (i1 < 0 || i2 < 0 || i3 < 0 || i1 >= dims_[0] || i2 >= dims_[1] || i3 >= dims_[2]) {
    throw std::out_of_range("ObservationMask::set: index outside dims");
  }
  set(i1 + dims_[0] * (i2 + dims_[1] * i3), observed);
}

Index ObservationMask::count() const {
  return static_cast<Index>(std::count(flags_.begin(), flags_.end(), std::uint8_t{1}));
}

ObservationMask ObservationMask::complement() const {
  ObservationMask out = *this;
  for (auto& f : out.flags_) f = f ? 0 : 1;
  return out;
}

Tensor3 ObservationMask::to_tensor() const {
  Tensor3 out(dims_);
  for (Index i = 0; i < size(); ++i) out[i] = (*this)[i] ? 1.0 : 0.0;
  return out;
}

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + dims_string(a) +
                                " vs " + dims_string(b) + ")");
  }
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  if (a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("kronecker: empty operand");
  }
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix unfold(const Tensor3& x, int mode) {
  check_mode(mode);
  const Dims& d = x.dims();
  if (mode == 1) return x.mode1();
  if (mode == 3) return ConstMap(x.values().data(), d[0] * d[1], d[2]).transpose();
  // mode 2: row i2, column i1 + D1 * i3.
  Matrix out(d[1], d[0] * d[2]);
  for (Index i3 = 0; i3 < d[2]; ++i3) {
    out.middleCols(d[0] * i3, d[0]) =
        ConstMap(x.values().data() + d[0] * d[1] * i3, d[0], d[1]).transpose();
  }
  return out;
}

Tensor3 fold(const Matrix& m, int mode, const Dims& dims) {
  check_mode(mode);
  check_dims(dims);
  const Index rows = dims[mode - 1];
  const Index cols = dims[0] * dims[1] * dims[2] / rows;
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument("fold: matrix shape " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + " inconsistent with mode " +
                                std::to_string(mode) + " of " + dims_string(dims));
  }
  Tensor3 out(dims);
  if (mode == 1) {
    out.mode1() = m;
  } else if (mode == 3) {
    MutMap(out.values().data(), dims[0] * dims[1], dims[2]) = m.transpose();
  } else {
    for (Index i3 = 0; i3 < dims[2]; ++i3) {
      MutMap(out.values().data() + dims[0] * dims[1] * i3, dims[0], dims[1]) =
          m.middleCols(dims[0] * i3, dims[0]).transpose();
    }
  }
  return out;
}

Tensor3 mode_n_product(const Tensor3& x, const Matrix& a, int mode) {
  return mode_product_impl<false>(x, a, mode);
}

Tensor3 mode_n_product_transposed(const Tensor3& x, const Matrix& a, int mode) {
  return mode_product_impl<true>(x, a, mode);
}

Tensor3 tucker_reconstruct(const Tensor3& core, const Matrix& u1, const Matrix& u2,
                           const Matrix& u3) {
  return mode_n_product(mode_n_product(mode_n_product(core, u1, 1), u2, 2), u3, 3);
}

Tensor3 tucker_reconstruct(const Tensor3& core, const std::array<Matrix, 3>& factors) {
  return tucker_reconstruct(core, factors[0], factors[1], factors[2]);
}

Tensor3 tucker_project(const Tensor3& x, const std::array<Matrix, 3>& factors) {
  return mode_n_product_transposed(
      mode_n_product_transposed(mode_n_product_transposed(x, factors[0], 1), factors[1], 2),
      factors[2], 3);
}

Tensor3 project_observed(const Tensor3& x, const ObservationMask& omega) {
  require_same_dims(x.dims(), omega.dims(), "project_observed");
  Tensor3 out = x;
  for (Index i = 0; i < out.size(); ++i) {
    if (!omega[i]) out[i] = 0.0;
  }
  return out;
}

Matrix toeplitz_diff(const Matrix& m) {
  if (m.rows() < 2) throw std::invalid_argument("toeplitz_diff: need at least 2 rows");
  const Index n = m.rows();
  return m.topRows(n - 1) - m.bottomRows(n - 1);
}

Matrix toeplitz_diff_adjoint(const Matrix& m) {
  const Index n = m.rows() + 1;
  Matrix out = Matrix::Zero(n, m.cols());
  out.topRows(n - 1) += m;
  out.bottomRows(n - 1) -= m;
  return out;
}

Matrix toeplitz_diff_cols(const Matrix& m) {
  if (m.cols() < 2) throw std::invalid_argument("toeplitz_diff_cols: need at least 2 columns");
  const Index n = m.cols();
  return m.leftCols(n - 1) - m.rightCols(n - 1);
}

Matrix toeplitz_diff_cols_adjoint(const Matrix& m) {
  const Index n = m.cols() + 1;
  Matrix out = Matrix::Zero(m.rows(), n);
  out.leftCols(n - 1) += m;
  out.rightCols(n - 1) -= m;
  return out;
}

Matrix block_diff(const Tensor3& r) {
  const auto r1 = r.mode1();
  const Index n = r1.rows();
  const Index c = r1.cols();
  // With a single row or column the difference operator has no rows.
  if (n < 2 || c < 2) return Matrix(std::max<Index>(n - 1, 0), std::max<Index>(c - 1, 0));
  // z_ij = r(i,j) - r(i+1,j) - r(i,j+1) + r(i+1,j+1)
  return r1.topLeftCorner(n - 1, c - 1) - r1.bottomLeftCorner(n - 1, c - 1) -
         r1.topRightCorner(n - 1, c - 1) + r1.bottomRightCorner(n - 1, c - 1);
}

Tensor3 block_diff_adjoint(const Matrix& m, const Dims& dims) {
  Tensor3 out(dims);
  auto o = out.mode1();
  if (m.rows() != o.rows() - 1 || m.cols() != o.cols() - 1) {
    throw std::invalid_argument("block_diff_adjoint: shape mismatch");
  }
  const Index n = m.rows();
  const Index c = m.cols();
  o.topLeftCorner(n, c) += m;
  o.bottomLeftCorner(n, c) -= m;
  o.topRightCorner(n, c) -= m;
  o.bottomRightCorner(n, c) += m;
  return out;
}

double frobenius_norm(const Tensor3& x) { return x.norm(); }
double frobenius_norm(const Matrix& m) { return m.norm(); }

double inner(const Tensor3& a, const Tensor3& b) {
  require_same_dims(a.dims(), b.dims(), "inner");
  return a.values().dot(b.values());
}

Index l0_count(const Tensor3& x) { return (x.values().array() != 0.0).count(); }
Index l0_count(const Matrix& m) { return (m.array() != 0.0).count(); }

Index l20_count(const Matrix& m) {
  Index n = 0;
  for (Index i = 0; i < m.rows(); ++i) {
    if ((m.row(i).array() != 0.0).any()) ++n;
  }
  return n;
}

double orthonormality_error(const Matrix& u) {
  return (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm();
}

}  // namespace tslto
