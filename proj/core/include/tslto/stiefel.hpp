#pragma once

// Feasible descent on the Stiefel manifold St(D, r) = {U : U^T U = I}.
//
// Iterates move along the Cayley curve
//   Y(tau) = (I + tau/2 A)^{-1} (I - tau/2 A) U,   A = G U^T - U G^T,
// which stays on the manifold for every tau. Steps start from an alternating
// Barzilai-Borwein guess and are accepted by monotone Armijo backtracking.

#include "tslto/tensor.hpp"

#include <functional>

namespace tslto {

struct SmoothObjective {
  std::function<double(const Matrix&)> value;
  /// Euclidean gradient, same shape as the argument.
  std::function<Matrix(const Matrix&)> gradient;
};

struct StiefelOptions {
  int max_iters = 60;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  /// Stop once ||A U||_F <= gradient_tol * (1 + ||U0||_F).
  double gradient_tol = 1e-8;
  double min_step = 1e-10;
  double max_step = 1e10;
  /// Re-orthonormalize when ||U^T U - I||_F exceeds this.
  double drift_tol = 1e-10;
};

struct StiefelResult {
  Matrix u;
  double value = 0.0;
  double initial_value = 0.0;
  int iterations = 0;
  bool converged = false;
};

StiefelResult minimize_on_stiefel(const SmoothObjective& objective, const Matrix& u0,
                                  const StiefelOptions& options = {});

/// Point on the Cayley curve at step tau for Euclidean gradient `grad` at `u`.
/// Uses the 2r x 2r Sherman-Morrison-Woodbury form when 2r < D.
Matrix cayley_point(const Matrix& u, const Matrix& grad, double tau);

/// Thin-QR re-orthonormalization with a positive R diagonal.
Matrix reorthonormalize(const Matrix& u);

/// Orthonormal D x r starting point, e.g. for tests and degenerate inputs.
Matrix orthonormal_basis(Index rows, Index cols);

}  // namespace tslto
