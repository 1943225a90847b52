#include "tslto/stiefel.hpp"

#include "tslto/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tslto {

namespace {

double checked_value(const SmoothObjective& obj, const Matrix& u) {
  const double v = obj.value(u);
  if (!std::isfinite(v)) throw NumericalError("stiefel: objective is not finite");
  return v;
}

Matrix checked_gradient(const SmoothObjective& obj, const Matrix& u) {
  Matrix g = obj.gradient(u);
  if (g.rows() != u.rows() || g.cols() != u.cols()) {
    throw std::invalid_argument("stiefel: gradient shape does not match the point");
  }
  if (!g.allFinite()) throw NumericalError("stiefel: gradient is not finite");
  return g;
}

}  // namespace

Matrix cayley_point(const Matrix& u, const Matrix& grad, double tau) {
  const Index d = u.rows();
  const Index r = u.cols();
  if (2 * r < d) {
    // A = L R^T with L = [G, U], R = [U, -G].
    Matrix left(d, 2 * r);
    left << grad, u;
    Matrix right(d, 2 * r);
    right << u, -grad;
    Matrix small = Matrix::Identity(2 * r, 2 * r);
    small.noalias() += 0.5 * tau * right.transpose() * left;
    const Matrix rhs = right.transpose() * u;
    return u - tau * left * small.partialPivLu().solve(rhs);
  }
  const Matrix a = grad * u.transpose() - u * grad.transpose();
  const Matrix id = Matrix::Identity(d, d);
  const Matrix lhs = id + 0.5 * tau * a;
  return lhs.partialPivLu().solve(u - 0.5 * tau * (a * u));
}

Matrix reorthonormalize(const Matrix& u) {
  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q = qr.householderQ() * Matrix::Identity(u.rows(), u.cols());
  const Matrix r = qr.matrixQR().topRows(u.cols()).triangularView<Eigen::Upper>();
  for (Index j = 0; j < u.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Matrix orthonormal_basis(Index rows, Index cols) {
  if (cols > rows) throw std::invalid_argument("orthonormal_basis: more columns than rows");
  return Matrix::Identity(rows, cols);
}

StiefelResult minimize_on_stiefel(const SmoothObjective& objective, const Matrix& u0,
                                  const StiefelOptions& options) {
  if (options.max_iters < 1) throw std::invalid_argument("stiefel: max_iters must be >= 1");
  if (u0.cols() > u0.rows() || u0.cols() == 0) {
    throw std::invalid_argument("stiefel: starting point must be D x r with 0 < r <= D");
  }
  if (orthonormality_error(u0) > 1e-8) {
    throw std::invalid_argument("stiefel: starting point is not orthonormal");
  }

  StiefelResult result;
  Matrix x = u0;
  double f = checked_value(objective, x);
  Matrix g = checked_gradient(objective, x);
  result.initial_value = f;

  const double stop = options.gradient_tol * (1.0 + u0.norm());
  double tau = 1e-2 / (1.0 + g.norm());

  Matrix x_prev;
  Matrix rgrad_prev;
  int it = 0;
  for (; it < options.max_iters; ++it) {
    const Matrix xtg = x.transpose() * g;
    // A U = G - U G^T U on the manifold.
    const Matrix rgrad = g - x * xtg.transpose();
    if (rgrad.norm() <= stop) {
      result.converged = true;
      break;
    }
    // dF(Y(tau))/dtau at 0 equals -||A||_F^2 / 2.
    const double deriv = -(g.squaredNorm() - (xtg * xtg).trace());

    if (it > 0) {
      const Matrix s = x - x_prev;
      const Matrix y = rgrad - rgrad_prev;
      const double sy = std::abs((s.array() * y.array()).sum());
      const double bb = (it % 2 == 1) ? s.squaredNorm() / sy : sy / y.squaredNorm();
      tau = std::isfinite(bb) ? std::clamp(bb, options.min_step, options.max_step)
                              : options.max_step;
    }

    Matrix trial;
    double f_trial = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= options.max_backtracks; ++bt) {
      trial = cayley_point(x, g, tau);
      f_trial = objective.value(trial);
      if (std::isfinite(f_trial) && f_trial <= f + options.armijo_c * tau * deriv) {
        accepted = true;
        break;
      }
      tau *= options.backtrack;
    }
    if (!accepted) break;

    if (orthonormality_error(trial) > options.drift_tol) trial = reorthonormalize(trial);
    x_prev = std::move(x);
    rgrad_prev = rgrad;
    x = std::move(trial);
    f = checked_value(objective, x);
    g = checked_gradient(objective, x);
  }

  result.u = std::move(x);
  result.value = f;
  result.iterations = it;
  return result;
}

}  // namespace tslto
