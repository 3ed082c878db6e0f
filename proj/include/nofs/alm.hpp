#pragma once

#include "nofs/solver.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace nofs {

// Violations of the four splitting constraints.
struct FeasibilityResiduals {
  Matrix r1;  // Y - X^T W - U
  Matrix r2;  // V - W
  Matrix r3;  // Y - F
  Matrix r4;  // Yhat - Y
  std::array<double, 4> inf_norms{};
};

FeasibilityResiduals compute_residuals(const SolverState& s,
                                       const DataMatrix& data);

// lambda_N + rho * R_N, clamped elementwise into [lambda_min, lambda_max].
Multipliers update_multipliers(const SolverState& s,
                               const FeasibilityResiduals& res,
                               const HyperParams& hp);

// Keeps rho when every residual shrank by factor tau since the previous
// outer iteration, otherwise multiplies by the growth factor. Pass no
// previous norms at k = 1 (treated as +infinity). Never decreases rho.
double update_penalty(const FeasibilityResiduals& now,
                      const std::array<double, 4>* prev_inf_norms, double rho,
                      const HyperParams& hp);

struct OuterRecord {
  int k = 0;
  double rho = 0.0;        // penalty used during this iteration
  double eps = 0.0;        // inner tolerance eps_k
  double theta_inf = 0.0;  // ||Theta^k||_inf at the accepted inner iterate
  std::array<double, 4> r_inf{};
  int inner_sweeps = 0;
  bool inner_converged = true;
  double lagrangian = 0.0;  // L_k at the accepted iterate (pre-update multipliers)
  double eta = 0.0;         // ||W_k - W_{k-1}|| / ||W_{k-1} - W_{k-2}||, 0 if undefined
  double descent_violation = 0.0;
};

struct OuterTrace {
  std::vector<OuterRecord> records;
  std::vector<Matrix> w_history;                    // W after each outer iteration
  std::vector<std::vector<double>> theta_histories; // per-iteration inner ||Theta||_inf
};

struct AlmResult {
  SolverState state;
  OuterTrace trace;
};

// Outer augmented Lagrangian loop: PAM subproblem solves with tolerance
// eps_k, multiplier update + clamp, penalty adaptation. PAM non-convergence
// is recorded in the trace, never thrown.
AlmResult alm_solve(const DataMatrix& data, const AffinityGraph& graph,
                    const HyperParams& hp, std::uint64_t seed);
AlmResult alm_solve(const DataMatrix& data, const AffinityGraph& graph,
                    const HyperParams& hp, SolverState init);

// Scalar KKT diagnostics of an iterate.
struct KktReport {
  double stationarity = 0.0;       // ||Theta||_inf
  double infeasibility = 0.0;      // max_i ||R_i||_inf
  double orthogonality_gap = 0.0;  // ||Yhat^T Yhat - I||_inf
  double box_violation = 0.0;      // largest excursion of F outside [0, 1]
  double box_min = 0.0;            // min entry of F
  double box_max = 0.0;            // max entry of F
};

KktReport kkt_report(const SolverState& s, const ThetaResidual& theta,
                     const FeasibilityResiduals& res);

}  // namespace nofs
