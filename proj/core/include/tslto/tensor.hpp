#pragma once

// Dense third-order tensors, mode-n algebra and the first-difference
// (Toeplitz) operators used by the TSLTO model.
//
// Storage convention: entry (i1, i2, i3) (0-based) lives at linear offset
// i1 + D1 * (i2 + D2 * i3). The mode-k unfolding puts i_k on the rows and
// orders the remaining modes ascending with the earlier mode varying fastest,
// so the mode-1 unfolding is a zero-copy column-major view of the storage and
//   [[G; U1, U2, U3]]_(1) = U1 * G_(1) * kron(U3, U2)^T.

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace tslto {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Dims = std::array<Index, 3>;

class Tensor3 {
 public:
  /// Empty placeholder (all dims zero). Every operation below requires a
  /// tensor built from positive dims.
  Tensor3() : dims_{0, 0, 0} {}
  explicit Tensor3(const Dims& dims, double fill = 0.0);
  Tensor3(const Dims& dims, Vector values);

  static Tensor3 zeros(const Dims& dims) { return Tensor3(dims); }
  static Tensor3 constant(const Dims& dims, double value) {
    return Tensor3(dims, value);
  }

  const Dims& dims() const { return dims_; }
  /// Size along a 1-based mode.
  Index dim(int mode) const;
  Index size() const { return values_.size(); }
  bool empty() const { return values_.size() == 0; }

  Index offset(Index i1, Index i2, Index i3) const {
    return i1 + dims_[0] * (i2 + dims_[1] * i3);
  }
  double& operator()(Index i1, Index i2, Index i3) {
    return values_[offset(i1, i2, i3)];
  }
  double operator()(Index i1, Index i2, Index i3) const {
    return values_[offset(i1, i2, i3)];
  }
  double& operator[](Index linear) { return values_[linear]; }
  double operator[](Index linear) const { return values_[linear]; }

  Vector& values() { return values_; }
  const Vector& values() const { return values_; }

  /// Mode-1 unfolding as a view (D1 x D2*D3).
  Eigen::Map<Matrix> mode1() {
    return {values_.data(), dims_[0], dims_[1] * dims_[2]};
  }
  Eigen::Map<const Matrix> mode1() const {
    return {values_.data(), dims_[0], dims_[1] * dims_[2]};
  }

  double squared_norm() const { return values_.squaredNorm(); }
  double norm() const { return values_.norm(); }
  bool all_finite() const { return values_.allFinite(); }
  void set_zero() { values_.setZero(); }

  Tensor3& operator+=(const Tensor3& other);
  Tensor3& operator-=(const Tensor3& other);
  Tensor3& operator*=(double scale) {
    values_ *= scale;
    return *this;
  }

  friend Tensor3 operator+(Tensor3 lhs, const Tensor3& rhs) { return lhs += rhs; }
  friend Tensor3 operator-(Tensor3 lhs, const Tensor3& rhs) { return lhs -= rhs; }
  friend Tensor3 operator*(Tensor3 lhs, double scale) { return lhs *= scale; }
  friend Tensor3 operator*(double scale, Tensor3 rhs) { return rhs *= scale; }
  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.dims_ == b.dims_ && a.values_ == b.values_;
  }

 private:
  Dims dims_;
  Vector values_;
};

/// The index set of observed entries, stored as one flag per tensor entry
/// using the Tensor3 linear layout.
class ObservationMask {
 public:
  ObservationMask() : dims_{0, 0, 0} {}
  explicit ObservationMask(const Dims& dims, bool observed = false);

  static ObservationMask full(const Dims& dims) { return ObservationMask(dims, true); }
  static ObservationMask none(const Dims& dims) { return ObservationMask(dims, false); }
  /// Entries whose value is nonzero are members.
  static ObservationMask from_nonzeros(const Tensor3& x);

  const Dims& dims() const { return dims_; }
  Index size() const { return static_cast<Index>(flags_.size()); }

  bool contains(Index i1, Index i2, Index i3) const {
    return flags_[static_cast<std::size_t>(i1 + dims_[0] * (i2 + dims_[1] * i3))] != 0;
  }
  bool operator[](Index linear) const { return flags_[static_cast<std::size_t>(linear)] != 0; }
  void set(Index i1, Index i2, Index i3, bool observed = true);
  void set(Index linear, bool observed = true) {
    flags_[static_cast<std::size_t>(linear)] = observed ? 1 : 0;
  }

  /// Number of members.
  Index count() const;
  ObservationMask complement() const;
  std::span<const std::uint8_t> flags() const { return flags_; }

  /// 1.0 on members, 0.0 elsewhere.
  Tensor3 to_tensor() const;

  friend bool operator==(const ObservationMask&, const ObservationMask&) = default;

 private:
  Dims dims_;
  std::vector<std::uint8_t> flags_;
};

void require_same_dims(const Dims& a, const Dims& b, const char* what);

Matrix kronecker(const Matrix& a, const Matrix& b);

Matrix unfold(const Tensor3& x, int mode);
Tensor3 fold(const Matrix& m, int mode, const Dims& dims);

/// X x_n A: replaces D_n by A.rows(); unfold(result, n) == A * unfold(X, n).
Tensor3 mode_n_product(const Tensor3& x, const Matrix& a, int mode);
/// X x_n A^T without forming the transpose.
Tensor3 mode_n_product_transposed(const Tensor3& x, const Matrix& a, int mode);

/// G x_1 U1 x_2 U2 x_3 U3.
Tensor3 tucker_reconstruct(const Tensor3& core, const Matrix& u1, const Matrix& u2,
                           const Matrix& u3);
Tensor3 tucker_reconstruct(const Tensor3& core, const std::array<Matrix, 3>& factors);

/// X x_1 U1^T x_2 U2^T x_3 U3^T.
Tensor3 tucker_project(const Tensor3& x, const std::array<Matrix, 3>& factors);

/// X on the mask, 0 elsewhere.
Tensor3 project_observed(const Tensor3& x, const ObservationMask& omega);

// First differences with the [1, -1] stencil, i.e. T * M for the
// (n-1) x n Toeplitz matrix T. Never materialized.
Matrix toeplitz_diff(const Matrix& m);
/// T^T * M for M with n-1 rows; the result has n rows.
Matrix toeplitz_diff_adjoint(const Matrix& m);
/// M * T^T: differences between consecutive columns.
Matrix toeplitz_diff_cols(const Matrix& m);
/// M * T for M with n-1 columns.
Matrix toeplitz_diff_cols_adjoint(const Matrix& m);

/// T_l * R_(1) * T_r^T, the two-sided difference of the mode-1 unfolding.
Matrix block_diff(const Tensor3& r);
/// fold_1(T_l^T * M * T_r), the adjoint of block_diff.
Tensor3 block_diff_adjoint(const Matrix& m, const Dims& dims);

double frobenius_norm(const Tensor3& x);
double frobenius_norm(const Matrix& m);
double inner(const Tensor3& a, const Tensor3& b);
Index l0_count(const Tensor3& x);
Index l0_count(const Matrix& m);
/// Number of nonzero rows.
Index l20_count(const Matrix& m);

/// Frobenius distance of U^T U from the identity.
double orthonormality_error(const Matrix& u);

}  // namespace tslto
