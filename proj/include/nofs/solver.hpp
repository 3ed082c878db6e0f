#pragma once

#include "nofs/dataset.hpp"
#include "nofs/graph.hpp"

#include <Eigen/Cholesky>

#include <cstdint>
#include <limits>
#include <vector>

namespace nofs {

// Model weights and schedule for the augmented Lagrangian solver. Defaults
// follow the reference configuration: tau = 0.99, growth 1.01, initial
// penalty c/2, multiplier clamp at +-100, inner tolerance 0.995^k, a single
// proximal constant 0.5, 20 outer iterations.
struct HyperParams {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;

  double tau = 0.99;             // residual-decrease factor, in [0, 1)
  double penalty_growth = 1.01;  // r > 1
  double rho_init = 0.0;         // <= 0 means c / 2
  double lambda_min = -100.0;
  double lambda_max = 100.0;
  double eps_base = 0.995;       // eps_k = eps_base^k
  double prox = 0.5;             // C, shared by all six block updates
  int max_outer = 20;
  int max_inner = 500;
  bool early_stop = false;       // optional KKT-tolerance stop, off by default
  double early_stop_tol = 1e-6;

  double eps(int k) const;
  double initial_rho(int c) const;
  void validate() const;
};

// Multipliers for the four splitting constraints
// (Y - X^T W - U, V - W, Y - F, Yhat - Y).
struct Multipliers {
  Matrix l1;  // n x c
  Matrix l2;  // d x c
  Matrix l3;  // n x c
  Matrix l4;  // n x c
};

// Primal blocks of the splitting plus multipliers and penalty.
struct SolverState {
  Matrix W;     // d x c transformation
  Matrix U;     // n x c auxiliary for Y - X^T W
  Matrix V;     // d x c auxiliary for W
  Matrix Y;     // n x c scaled cluster indicator iterate
  Matrix F;     // n x c box-constrained block, entries in [0, 1]
  Matrix Yhat;  // n x c with orthonormal columns
  Multipliers lambda;
  double rho = 0.0;
};

// Feasible deterministic start: Yhat is the orthonormal factor of a seeded
// Gaussian matrix, Y = Yhat, F = clamp(Y, 0, 1), W = V = 0, U = Y.
SolverState make_initial_state(const DataMatrix& data, const HyperParams& hp,
                               std::uint64_t seed);

// Subgradient certificate produced by one Gauss-Seidel sweep; the inner
// loop stops when its max-abs entry falls below eps_k.
struct ThetaResidual {
  Matrix t1;  // d x c
  Matrix t2;  // n x c
  Matrix t3;  // d x c
  Matrix t4;  // n x c
  Matrix t5;  // n x c
  Matrix t6;  // n x c
  double inf_norm = 0.0;
};

ThetaResidual compute_theta(const SolverState& prev, const SolverState& next,
                            const HyperParams& hp, const DataMatrix& data);

// Value of the augmented Lagrangian at `s` (multipliers and penalty taken
// from the state). Returns +infinity when F leaves the box or Yhat drifts
// off the orthonormality constraint.
double augmented_lagrangian_value(const SolverState& s, const DataMatrix& data,
                                  const AffinityGraph& graph,
                                  const HyperParams& hp);

// Sum over the six primal blocks of squared Frobenius differences.
double state_sq_distance(const SolverState& a, const SolverState& b);

struct PamResult {
  ThetaResidual theta;
  int sweeps = 0;
  bool converged = false;
  std::vector<double> theta_history;  // ||Theta||_inf after each sweep
  // max over sweeps of L(T_new) + (C/2)||T_new - T_old||_F^2 - L(T_old);
  // nonpositive (up to roundoff) when every block solve is exact
  double max_descent_violation = -std::numeric_limits<double>::infinity();
  int rank_warnings = 0;  // rank-deficient SVDs hit in the Yhat update
};

// Proximal alternating minimization for one augmented Lagrangian
// subproblem. Holds the factorizations shared by the W and Y updates;
// they depend only on rho (gamma and the proximal constant are fixed), so
// they are rebuilt exactly when rho changes.
class PamSolver {
 public:
  PamSolver(const DataMatrix& data, const AffinityGraph& graph,
            HyperParams hp);

  // Closed-form block updates (Gauss-Seidel order W, U, V, Y, F, Yhat).
  // Each reads exactly the blocks its formula expects: pass the state as it
  // stands mid-sweep, with already-updated blocks written back.
  Matrix update_W(const SolverState& s, double c1);
  Matrix update_U(const SolverState& s, double c2) const;
  Matrix update_V(const SolverState& s, double c3) const;
  Matrix update_Y(const SolverState& s, double c4);
  Matrix update_F(const SolverState& s, double c5) const;
  Matrix update_Yhat(const SolverState& s, double c6,
                     bool* rank_deficient = nullptr) const;

  // Sweeps (a)-(f) until ||Theta||_inf <= eps_k or hp.max_inner sweeps.
  // The state is advanced in place; non-convergence is reported, not thrown.
  PamResult solve(SolverState& state, double eps_k);

  double lagrangian(const SolverState& s) const;

  const HyperParams& params() const { return hp_; }

 private:
  void refresh_factorizations(double rho);

  const DataMatrix& data_;
  const AffinityGraph& graph_;
  HyperParams hp_;
  bool woodbury_;   // d > n: solve the n x n system instead of the d x d one
  Matrix gram_;     // X^T X (woodbury) or X X^T (direct), built once
  double cached_rho_ = -1.0;
  Eigen::LLT<Matrix> llt_w_;
  Eigen::LLT<Matrix> llt_y_;
};

}  // namespace nofs
