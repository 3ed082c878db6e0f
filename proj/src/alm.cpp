#include "nofs/alm.hpp"

#include "nofs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nofs {

namespace {

double max_abs_of(const Matrix& m) {
  return kernels::max_abs(m.data(), static_cast<std::size_t>(m.size()));
}

Matrix clamped_step(const Matrix& lambda, double rho, const Matrix& residual,
                    double lo, double hi) {
  Matrix out = lambda;
  const auto len = static_cast<std::size_t>(out.size());
  kernels::axpy(rho, residual.data(), out.data(), len);
  kernels::clamp(out.data(), lo, hi, out.data(), len);
  return out;
}

}  // namespace

FeasibilityResiduals compute_residuals(const SolverState& s,
                                       const DataMatrix& data) {
  FeasibilityResiduals res;
  res.r1 = s.Y - data.X.transpose() * s.W - s.U;
  res.r2 = s.V - s.W;
  res.r3 = s.Y - s.F;
  res.r4 = s.Yhat - s.Y;
  res.inf_norms = {max_abs_of(res.r1), max_abs_of(res.r2), max_abs_of(res.r3),
                   max_abs_of(res.r4)};
  return res;
}

Multipliers update_multipliers(const SolverState& s,
                               const FeasibilityResiduals& res,
                               const HyperParams& hp) {
  Multipliers out;
  out.l1 = clamped_step(s.lambda.l1, s.rho, res.r1, hp.lambda_min, hp.lambda_max);
  out.l2 = clamped_step(s.lambda.l2, s.rho, res.r2, hp.lambda_min, hp.lambda_max);
  out.l3 = clamped_step(s.lambda.l3, s.rho, res.r3, hp.lambda_min, hp.lambda_max);
  out.l4 = clamped_step(s.lambda.l4, s.rho, res.r4, hp.lambda_min, hp.lambda_max);
  return out;
}

double update_penalty(const FeasibilityResiduals& now,
                      const std::array<double, 4>* prev_inf_norms, double rho,
                      const HyperParams& hp) {
  bool decreased = true;
  for (int i = 0; i < 4; ++i) {
    const double prev = prev_inf_norms
                            ? (*prev_inf_norms)[static_cast<std::size_t>(i)]
                            : std::numeric_limits<double>::infinity();
    double threshold = hp.tau * prev;
    if (std::isnan(threshold)) threshold = 0.0;  // tau = 0 against +inf
    if (!(now.inf_norms[static_cast<std::size_t>(i)] <= threshold)) {
      decreased = false;
      break;
    }
  }
  return decreased ? rho : hp.penalty_growth * rho;
}

namespace {

AlmResult run_alm(const DataMatrix& data, const AffinityGraph& graph,
                  const HyperParams& hp, SolverState state) {
  hp.validate();
  if (state.rho <= 0) state.rho = hp.initial_rho(data.c);

  PamSolver solver(data, graph, hp);
  AlmResult out;
  OuterTrace& trace = out.trace;
  std::array<double, 4> prev_inf{};
  bool have_prev = false;

  for (int k = 1; k <= hp.max_outer; ++k) {
    const double eps_k = hp.eps(k);
    const PamResult pam = solver.solve(state, eps_k);
    const FeasibilityResiduals res = compute_residuals(state, data);
    const double l_value = solver.lagrangian(state);

    trace.w_history.push_back(state.W);
    trace.theta_histories.push_back(pam.theta_history);

    OuterRecord rec;
    rec.k = k;
    rec.rho = state.rho;
    rec.eps = eps_k;
    rec.theta_inf = pam.theta.inf_norm;
    rec.r_inf = res.inf_norms;
    rec.inner_sweeps = pam.sweeps;
    rec.inner_converged = pam.converged;
    rec.lagrangian = l_value;
    rec.descent_violation = pam.max_descent_violation;
    const std::size_t h = trace.w_history.size();
    if (h >= 3) {
      const double num = (trace.w_history[h - 1] - trace.w_history[h - 2]).norm();
      const double den = (trace.w_history[h - 2] - trace.w_history[h - 3]).norm();
      rec.eta = den > 0 ? num / den : 0.0;
    }
    trace.records.push_back(rec);

    state.lambda = update_multipliers(state, res, hp);
    state.rho = update_penalty(res, have_prev ? &prev_inf : nullptr, state.rho, hp);
    prev_inf = res.inf_norms;
    have_prev = true;

    if (hp.early_stop) {
      const double infeas = *std::max_element(res.inf_norms.begin(),
                                              res.inf_norms.end());
      if (pam.theta.inf_norm <= hp.early_stop_tol &&
          infeas <= hp.early_stop_tol)
        break;
    }
  }

  out.state = std::move(state);
  return out;
}

}  // namespace

AlmResult alm_solve(const DataMatrix& data, const AffinityGraph& graph,
                    const HyperParams& hp, std::uint64_t seed) {
  return run_alm(data, graph, hp, make_initial_state(data, hp, seed));
}

AlmResult alm_solve(const DataMatrix& data, const AffinityGraph& graph,
                    const HyperParams& hp, SolverState init) {
  return run_alm(data, graph, hp, std::move(init));
}

KktReport kkt_report(const SolverState& s, const ThetaResidual& theta,
                     const FeasibilityResiduals& res) {
  KktReport rep;
  rep.stationarity = theta.inf_norm;
  rep.infeasibility =
      *std::max_element(res.inf_norms.begin(), res.inf_norms.end());
  const Matrix gram = s.Yhat.transpose() * s.Yhat;
  rep.orthogonality_gap = max_abs_of(
      Matrix(gram - Matrix::Identity(gram.rows(), gram.cols())));
  rep.box_min = s.F.minCoeff();
  rep.box_max = s.F.maxCoeff();
  rep.box_violation =
      std::max({0.0, -rep.box_min, rep.box_max - 1.0});
  return rep;
}

}  // namespace nofs
