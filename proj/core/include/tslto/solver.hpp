#pragma once

// ADMM for the sparse low-rank Tucker model
//
//   min  beta/2 ||[[G; U1, U2, U3]] - L||^2 + sum_i lambda_i ||Y_i||_{2,0}
//        + mu1 ||R||_0 + mu2 ||Z||_0
//   s.t. Y_i = T_i U_i,  Z = T_l R_(1) T_r^T,  U_i^T U_i = I,
//        X = L + R,  X = Y on the observed set.
//
// One outer iteration updates, in order: recovered tensor X, core G, factors
// U1..U3 (Gauss-Seidel), anomaly R (one backtracking proximal-gradient step),
// low-rank part L, factor differences Y_i, anomaly differences Z, and the
// multipliers V_i, W, P. Penalties alpha, gamma and s then grow geometrically
// up to a cap.

#include "tslto/factor_objective.hpp"
#include "tslto/tensor.hpp"
#include "tslto/tucker.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace tslto {

struct SolverConfig {
  double beta = 450.0;
  std::array<double, 3> lambda{1.2, 1.2, 1.2};
  double mu1 = 5.0;
  double mu2 = 20.0;
  std::array<double, 3> alpha{100.0, 100.0, 100.0};
  double gamma = 10.0;
  double s = 2.0;
  /// Per-iteration factor applied to alpha, gamma and s. Fast growth (e.g.
  /// 1.15) freezes the anomaly estimate within ~100 iterations, before the
  /// anomaly blocks have filled in over missing entries; 1.002 lets them fill
  /// and still converges in a few thousand iterations on 50^3 problems.
  double growth = 1.002;
  double penalty_cap = 1e8;
  double epsilon = 1e-4;
  Ranks ranks{3, 3, 3};
  int max_outer = 200000;
  int max_inner = 60;
  /// Initial proximal step for the anomaly update; 0 selects 1/s.
  double prox_lambda0 = 0.0;
  double prox_rho = 0.5;
  /// Recorded with the run; the solver itself draws no random numbers.
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

/// Penalty parameters at the current iteration (they grow between iterations).
struct Penalties {
  std::array<double, 3> alpha{};
  double gamma = 0.0;
  double s = 0.0;
};

struct SolverState {
  Tensor3 recovered;       // X
  Tensor3 lowrank;         // L
  Tensor3 anomaly;         // R
  Tensor3 core;            // G
  Factors factors;         // U_i
  std::array<Matrix, 3> factor_diff;       // Y_i ~ T_i U_i
  Matrix anomaly_diff;                     // Z ~ T_l R_(1) T_r^T
  std::array<Matrix, 3> factor_diff_dual;  // V_i
  Matrix anomaly_diff_dual;                // W
  Tensor3 split_dual;                      // P, for X = L + R
  Penalties penalties;
  double prox_step = 0.0;
  int iter = 0;
};

struct Residuals {
  std::array<double, 3> factor_diff{};  // ||Y_i - T_i U_i||
  double anomaly_diff = 0.0;            // ||Z - T_l R_(1) T_r^T||
  double split = 0.0;                   // ||X - L - R||
};

Residuals residuals(const SolverState& state);

/// Relative changes of X, G, L, R between two iterates. A block whose
/// previous norm is zero reports its absolute change instead.
struct BlockChanges {
  double recovered = 0.0;
  double core = 0.0;
  double lowrank = 0.0;
  double anomaly = 0.0;
};

BlockChanges block_changes(const SolverState& prev, const SolverState& cur);
bool check_convergence(const SolverState& prev, const SolverState& cur, double epsilon);

/// HOSVD start from the zero-filled observations; all multipliers zero.
SolverState init_state(const Tensor3& observed, const ObservationMask& omega,
                       const SolverConfig& cfg);

/// (Y)_Omega + (L + R - P/s) off Omega.
Tensor3 update_recovered(const SolverState& state, const Tensor3& observed,
                         const ObservationMask& omega);
/// L x_1 U1^T x_2 U2^T x_3 U3^T.
Tensor3 update_core(const SolverState& state);
/// Sequential Stiefel minimization of each factor subproblem, using the
/// already-updated earlier factors.
Factors update_factors(const SolverState& state, const SolverConfig& cfg);

struct AnomalyStep {
  Tensor3 anomaly;
  double step = 0.0;
  int backtracks = 0;
};

/// Smooth part of the anomaly subproblem and its gradient.
double anomaly_smooth_value(const SolverState& state, const Tensor3& anomaly);
Tensor3 anomaly_smooth_gradient(const SolverState& state, const Tensor3& anomaly);

/// One proximal-gradient step with backtracking from state.prox_step.
/// Throws NumericalError after 50 step reductions.
AnomalyStep update_anomaly(const SolverState& state, const SolverConfig& cfg);

/// (beta [[G; U]] + s (X - R) + P) / (beta + s).
Tensor3 update_lowrank(const SolverState& state, const SolverConfig& cfg);
Tensor3 update_lowrank(const SolverState& state, const SolverConfig& cfg,
                       const Tensor3& reconstruction);

std::array<Matrix, 3> update_factor_diff(const SolverState& state, const SolverConfig& cfg);
Matrix update_anomaly_diff(const SolverState& state, const SolverConfig& cfg);

struct Multipliers {
  std::array<Matrix, 3> factor_diff;
  Matrix anomaly_diff;
  Tensor3 split;
};

Multipliers update_multipliers(const SolverState& state);

/// Model objective: beta/2 ||[[G;U]] - L||^2 + sum lambda_i ||Y_i||_{2,0}
/// + mu1 ||R||_0 + mu2 ||Z||_0.
double model_objective(const SolverState& state, const SolverConfig& cfg,
                       const Tensor3& reconstruction);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  Residuals residuals;
  BlockChanges changes;
  double s = 0.0;
  double prox_step = 0.0;
};

struct SolveResult {
  Tensor3 recovered;
  Tensor3 lowrank;
  Tensor3 anomaly;
  Tensor3 core;
  Factors factors;
  int iterations = 0;
  bool converged = false;
  Residuals final_residuals;
  std::vector<IterationRecord> trace;
};

struct SolveOptions {
  bool record_trace = false;
  /// Called after every outer iteration; return false to stop early.
  std::function<bool(const SolverState&, const IterationRecord&)> on_iteration;
};

SolveResult solve(const Tensor3& observed, const ObservationMask& omega, const SolverConfig& cfg,
                  const SolveOptions& options = {});

}  // namespace tslto
