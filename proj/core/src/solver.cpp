#include "tslto/solver.hpp"

#include "tslto/errors.hpp"
#include "tslto/prox.hpp"
#include "tslto/stiefel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tslto {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("SolverConfig: ") + what);
}

double relative_change(const Tensor3& prev, const Tensor3& cur) {
  const double diff = (prev.values() - cur.values()).norm();
  const double base = prev.norm();
  return base > 0.0 ? diff / base : diff;
}

struct Snapshot {
  Tensor3 recovered, core, lowrank, anomaly;
};

BlockChanges changes_since(const Snapshot& prev, const SolverState& cur) {
  return {relative_change(prev.recovered, cur.recovered), relative_change(prev.core, cur.core),
          relative_change(prev.lowrank, cur.lowrank), relative_change(prev.anomaly, cur.anomaly)};
}

bool all_below(const BlockChanges& c, double epsilon) {
  return c.recovered < epsilon && c.core < epsilon && c.lowrank < epsilon && c.anomaly < epsilon;
}

void grow(double& value, double factor, double cap) { value = std::min(value * factor, cap); }

}  // namespace

void SolverConfig::validate() const {
  require(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0");
  for (double l : lambda) require(std::isfinite(l) && l >= 0.0, "lambda must be >= 0");
  require(std::isfinite(mu1) && mu1 >= 0.0, "mu1 must be >= 0");
  require(std::isfinite(mu2) && mu2 >= 0.0, "mu2 must be >= 0");
  for (double a : alpha) require(std::isfinite(a) && a > 0.0, "alpha must be > 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(std::isfinite(s) && s > 0.0, "s must be > 0");
  require(std::isfinite(growth) && growth >= 1.0, "growth must be >= 1");
  require(penalty_cap > 0.0, "penalty_cap must be > 0");
  require(epsilon > 0.0, "epsilon must be > 0");
  for (Index r : ranks) require(r >= 1, "ranks must be >= 1");
  require(max_outer >= 1, "max_outer must be >= 1");
  require(max_inner >= 1, "max_inner must be >= 1");
  require(std::isfinite(prox_lambda0) && prox_lambda0 >= 0.0, "prox_lambda0 must be >= 0");
  require(prox_rho > 0.0 && prox_rho < 1.0, "prox_rho must lie in (0, 1)");
}

Residuals residuals(const SolverState& state) {
  Residuals r;
  for (int i = 0; i < 3; ++i) {
    r.factor_diff[i] = (state.factor_diff[i] - toeplitz_diff(state.factors[i])).norm();
  }
  r.anomaly_diff = (state.anomaly_diff - block_diff(state.anomaly)).norm();
  r.split = (state.recovered - state.lowrank - state.anomaly).norm();
  return r;
}

BlockChanges block_changes(const SolverState& prev, const SolverState& cur) {
  return changes_since({prev.recovered, prev.core, prev.lowrank, prev.anomaly}, cur);
}

bool check_convergence(const SolverState& prev, const SolverState& cur, double epsilon) {
  return all_below(block_changes(prev, cur), epsilon);
}

SolverState init_state(const Tensor3& observed, const ObservationMask& omega,
                       const SolverConfig& cfg) {
  require_same_dims(observed.dims(), omega.dims(), "init_state");
  check_ranks(cfg.ranks, observed.dims());
  for (Index d : observed.dims()) {
    if (d < 2) throw std::invalid_argument("init_state: every dimension must be at least 2");
  }
  if (omega.count() == 0) throw std::invalid_argument("init_state: observation set is empty");

  SolverState st;
  const Dims& dims = observed.dims();
  st.recovered = project_observed(observed, omega);
  st.lowrank = st.recovered;
  st.anomaly = Tensor3::zeros(dims);
  TuckerFactors tucker = hosvd(st.lowrank, cfg.ranks);
  st.core = std::move(tucker.core);
  st.factors = std::move(tucker.factors);
  for (int i = 0; i < 3; ++i) {
    st.factor_diff[i] = toeplitz_diff(st.factors[i]);
    st.factor_diff_dual[i] = Matrix::Zero(dims[i] - 1, cfg.ranks[i]);
  }
  st.anomaly_diff = Matrix::Zero(dims[0] - 1, dims[1] * dims[2] - 1);
  st.anomaly_diff_dual = st.anomaly_diff;
  st.split_dual = Tensor3::zeros(dims);
  st.penalties = {cfg.alpha, cfg.gamma, cfg.s};
  st.prox_step = cfg.prox_lambda0 > 0.0 ? cfg.prox_lambda0 : 1.0 / cfg.s;
  st.iter = 0;
  return st;
}

Tensor3 update_recovered(const SolverState& state, const Tensor3& observed,
                         const ObservationMask& omega) {
  require_same_dims(observed.dims(), omega.dims(), "update_recovered");
  require_same_dims(observed.dims(), state.lowrank.dims(), "update_recovered");
  const double inv_s = 1.0 / state.penalties.s;
  Tensor3 x(observed.dims());
  for (Index i = 0; i < x.size(); ++i) {
    x[i] = omega[i] ? observed[i]
                    : state.lowrank[i] + state.anomaly[i] - inv_s * state.split_dual[i];
  }
  return x;
}

Tensor3 update_core(const SolverState& state) {
  return tucker_project(state.lowrank, state.factors);
}

Factors update_factors(const SolverState& state, const SolverConfig& cfg) {
  Factors factors = state.factors;
  StiefelOptions opts;
  opts.max_iters = cfg.max_inner;
  for (int mode = 1; mode <= 3; ++mode) {
    const int i = mode - 1;
    FactorSubproblem sub(state.core, factors, state.lowrank, cfg.beta, mode,
                         {state.factor_diff[i], state.factor_diff_dual[i], state.penalties.alpha[i]});
    factors[i] = minimize_on_stiefel(sub.objective(), factors[i], opts).u;
  }
  return factors;
}

double anomaly_smooth_value(const SolverState& state, const Tensor3& anomaly) {
  const Matrix gap = state.anomaly_diff - block_diff(anomaly);
  const Vector split =
      state.recovered.values() - state.lowrank.values() - anomaly.values();
  const double s = state.penalties.s;
  return (gap.array() * state.anomaly_diff_dual.array()).sum() +
         0.5 * state.penalties.gamma * gap.squaredNorm() +
         split.dot(state.split_dual.values()) + 0.5 * s * split.squaredNorm();
}

Tensor3 anomaly_smooth_gradient(const SolverState& state, const Tensor3& anomaly) {
  const Matrix gap = state.anomaly_diff - block_diff(anomaly);
  Tensor3 grad = block_diff_adjoint(state.anomaly_diff_dual + state.penalties.gamma * gap,
                                    anomaly.dims());
  grad.values() = -grad.values() - state.split_dual.values() -
                  state.penalties.s *
                      (state.recovered.values() - state.lowrank.values() - anomaly.values());
  return grad;
}

AnomalyStep update_anomaly(const SolverState& state, const SolverConfig& cfg) {
  constexpr int kMaxReductions = 50;
  if (!(state.prox_step > 0.0)) throw std::invalid_argument("update_anomaly: step must be > 0");
  const Tensor3& current = state.anomaly;
  const Tensor3 grad = anomaly_smooth_gradient(state, current);
  const double f0 = anomaly_smooth_value(state, current);
  const double slack = 1e-12 * (1.0 + std::abs(f0));

  double step = state.prox_step;
  for (int k = 0; k <= kMaxReductions; ++k) {
    Tensor3 candidate = current;
    candidate.values() -= step * grad.values();
    hard_threshold_l0_inplace(candidate.values(), ProxWeight(step * cfg.mu1));
    const Vector diff = candidate.values() - current.values();
    const double model = f0 + grad.values().dot(diff) + diff.squaredNorm() / (2.0 * step);
    if (anomaly_smooth_value(state, candidate) <= model + slack) {
      return {std::move(candidate), step, k};
    }
    step *= cfg.prox_rho;
  }
  throw NumericalError("anomaly update: line search failed after 50 step reductions at iteration " +
                       std::to_string(state.iter + 1));
}

Tensor3 update_lowrank(const SolverState& state, const SolverConfig& cfg,
                       const Tensor3& reconstruction) {
  const double s = state.penalties.s;
  const double denom = cfg.beta + s;
  if (!(denom > 0.0)) throw std::invalid_argument("update_lowrank: beta + s must be > 0");
  Tensor3 out(reconstruction.dims());
  out.values() = (cfg.beta * reconstruction.values() +
                  s * (state.recovered.values() - state.anomaly.values()) +
                  state.split_dual.values()) /
                 denom;
  return out;
}

Tensor3 update_lowrank(const SolverState& state, const SolverConfig& cfg) {
  return update_lowrank(state, cfg, tucker_reconstruct(state.core, state.factors));
}

std::array<Matrix, 3> update_factor_diff(const SolverState& state, const SolverConfig& cfg) {
  std::array<Matrix, 3> out;
  for (int i = 0; i < 3; ++i) {
    const double a = state.penalties.alpha[i];
    out[i] = group_hard_threshold_l20(
        toeplitz_diff(state.factors[i]) - state.factor_diff_dual[i] / a,
        ProxWeight(cfg.lambda[i] / a));
  }
  return out;
}

Matrix update_anomaly_diff(const SolverState& state, const SolverConfig& cfg) {
  const double g = state.penalties.gamma;
  return hard_threshold_l0(block_diff(state.anomaly) - state.anomaly_diff_dual / g,
                           ProxWeight(cfg.mu2 / g));
}

Multipliers update_multipliers(const SolverState& state) {
  Multipliers m;
  for (int i = 0; i < 3; ++i) {
    m.factor_diff[i] = state.factor_diff_dual[i] +
                       state.penalties.alpha[i] *
                           (state.factor_diff[i] - toeplitz_diff(state.factors[i]));
  }
  m.anomaly_diff = state.anomaly_diff_dual +
                   state.penalties.gamma * (state.anomaly_diff - block_diff(state.anomaly));
  m.split = state.split_dual;
  m.split.values() += state.penalties.s * (state.recovered.values() - state.lowrank.values() -
                                           state.anomaly.values());
  return m;
}

double model_objective(const SolverState& state, const SolverConfig& cfg,
                       const Tensor3& reconstruction) {
  double obj = 0.5 * cfg.beta * (reconstruction - state.lowrank).squared_norm();
  for (int i = 0; i < 3; ++i) {
    obj += cfg.lambda[i] * static_cast<double>(l20_count(state.factor_diff[i]));
  }
  obj += cfg.mu1 * static_cast<double>(l0_count(state.anomaly));
  obj += cfg.mu2 * static_cast<double>(l0_count(state.anomaly_diff));
  return obj;
}

SolveResult solve(const Tensor3& observed, const ObservationMask& omega, const SolverConfig& cfg,
                  const SolveOptions& options) {
  cfg.validate();
  SolverState st = init_state(observed, omega, cfg);
  SolveResult result;

  for (int k = 1; k <= cfg.max_outer; ++k) {
    const Snapshot prev{st.recovered, st.core, st.lowrank, st.anomaly};

    st.recovered = update_recovered(st, observed, omega);
    st.core = update_core(st);
    st.factors = update_factors(st, cfg);
    AnomalyStep step = update_anomaly(st, cfg);
    st.anomaly = std::move(step.anomaly);
    st.prox_step = step.step;
    const Tensor3 reconstruction = tucker_reconstruct(st.core, st.factors);
    st.lowrank = update_lowrank(st, cfg, reconstruction);
    st.factor_diff = update_factor_diff(st, cfg);
    st.anomaly_diff = update_anomaly_diff(st, cfg);
    Multipliers duals = update_multipliers(st);
    st.factor_diff_dual = std::move(duals.factor_diff);
    st.anomaly_diff_dual = std::move(duals.anomaly_diff);
    st.split_dual = std::move(duals.split);
    st.iter = k;

    if (!st.recovered.all_finite() || !st.lowrank.all_finite() || !st.anomaly.all_finite() ||
        !st.split_dual.all_finite()) {
      throw NumericalError("solver state became non-finite at iteration " + std::to_string(k) +
                           " (s = " + std::to_string(st.penalties.s) + ")");
    }

    IterationRecord rec;
    rec.iter = k;
    rec.changes = changes_since(prev, st);
    rec.s = st.penalties.s;
    rec.prox_step = st.prox_step;
    if (options.record_trace || options.on_iteration) {
      rec.objective = model_objective(st, cfg, reconstruction);
      rec.residuals = residuals(st);
    }
    if (options.record_trace) result.trace.push_back(rec);
    result.iterations = k;

    if (options.on_iteration && !options.on_iteration(st, rec)) break;
    if (k > 1 && all_below(rec.changes, cfg.epsilon)) {
      result.converged = true;
      break;
    }

    for (double& a : st.penalties.alpha) grow(a, cfg.growth, cfg.penalty_cap);
    grow(st.penalties.gamma, cfg.growth, cfg.penalty_cap);
    grow(st.penalties.s, cfg.growth, cfg.penalty_cap);
  }

  result.final_residuals = residuals(st);
  result.recovered = std::move(st.recovered);
  result.lowrank = std::move(st.lowrank);
  result.anomaly = std::move(st.anomaly);
  result.core = std::move(st.core);
  result.factors = std::move(st.factors);
  return result;
}

}  // namespace tslto
