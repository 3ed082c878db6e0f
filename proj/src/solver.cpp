#include "nofs/solver.hpp"

#include "nofs/kernels.hpp"
#include "nofs/rng.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace nofs {

namespace {

constexpr double kOrthTol = 1e-8;

double max_abs_of(const Matrix& m) {
  return kernels::max_abs(m.data(), static_cast<std::size_t>(m.size()));
}

double l21_norm(const Matrix& m) {
  double acc = 0.0;
  for (Index i = 0; i < m.rows(); ++i) acc += m.row(i).norm();
  return acc;
}

// Shared by the U and V updates: row-wise group soft-thresholding of the
// proximal average of `target` and `prev` with weight `weight`.
Matrix group_threshold(const Matrix& target, const Matrix& prev, double rho,
                       double prox_c, double weight) {
  const Index rows = target.rows();
  const Index cols = target.cols();
  Matrix blend(rows, cols);
  kernels::lincomb2(rho / (rho + prox_c), target.data(),
                    prox_c / (rho + prox_c), prev.data(), blend.data(),
                    static_cast<std::size_t>(rows * cols));
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    // threshold uses ||rho*target_i + C*prev_i|| = (rho + C)*||blend_i||
    const double gate = (rho * target.row(i) + prox_c * prev.row(i)).norm();
    if (gate <= weight) {
      out.row(i).setZero();  // covers the degenerate all-zero row as well
    } else {
      out.row(i) = (1.0 - weight / gate) * blend.row(i);
    }
  }
  return out;
}

}  // namespace

double HyperParams::eps(int k) const { return std::pow(eps_base, k); }

double HyperParams::initial_rho(int c) const {
  return rho_init > 0 ? rho_init : static_cast<double>(c) / 2.0;
}

void HyperParams::validate() const {
  if (alpha < 0 || beta < 0 || gamma < 0)
    throw std::invalid_argument("model weights must be nonnegative");
  if (tau < 0 || tau >= 1)
    throw std::invalid_argument("tau must lie in [0, 1)");
  if (penalty_growth <= 1)
    throw std::invalid_argument("penalty growth factor must exceed 1");
  if (lambda_min >= lambda_max)
    throw std::invalid_argument("multiplier bounds must satisfy min < max");
  if (eps_base <= 0 || eps_base >= 1)
    throw std::invalid_argument("eps base must lie in (0, 1)");
  if (prox <= 0) throw std::invalid_argument("proximal constant must be positive");
  if (max_outer < 1 || max_inner < 1)
    throw std::invalid_argument("iteration caps must be at least 1");
}

SolverState make_initial_state(const DataMatrix& data, const HyperParams& hp,
                               std::uint64_t seed) {
  const Index d = data.dim();
  const Index n = data.samples();
  const Index c = data.c;

  rng::Prng prng(rng::derive(seed, 0x696e6974));
  const Matrix G = rng::gaussian_matrix(n, c, prng);
  Eigen::HouseholderQR<Matrix> qr(G);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, c);

  SolverState s;
  s.Yhat = Q;
  s.Y = Q;
  s.F = Q.cwiseMax(0.0).cwiseMin(1.0);
  s.W = Matrix::Zero(d, c);
  s.V = Matrix::Zero(d, c);
  s.U = s.Y;  // Y - X^T W with W = 0
  s.lambda.l1 = Matrix::Zero(n, c);
  s.lambda.l2 = Matrix::Zero(d, c);
  s.lambda.l3 = Matrix::Zero(n, c);
  s.lambda.l4 = Matrix::Zero(n, c);
  s.rho = hp.initial_rho(data.c);
  return s;
}

ThetaResidual compute_theta(const SolverState& prev, const SolverState& next,
                            const HyperParams& hp, const DataMatrix& data) {
  const double rho = next.rho;
  const double c = hp.prox;
  const Matrix dW = prev.W - next.W;
  const Matrix dU = prev.U - next.U;
  const Matrix dV = prev.V - next.V;
  const Matrix dY = prev.Y - next.Y;
  const Matrix dF = prev.F - next.F;
  const Matrix dYh = prev.Yhat - next.Yhat;

  ThetaResidual th;
  th.t1 = rho * (data.X * (dY - dU)) + rho * dV + c * dW;
  th.t2 = rho * dY + c * dU;
  th.t3 = c * dV;
  th.t4 = rho * dF + rho * dYh + c * dY;
  th.t5 = c * dF;
  th.t6 = c * dYh;

  th.inf_norm = 0.0;
  for (const Matrix* m : {&th.t1, &th.t2, &th.t3, &th.t4, &th.t5, &th.t6})
    th.inf_norm = std::max(th.inf_norm, max_abs_of(*m));
  return th;
}

double augmented_lagrangian_value(const SolverState& s, const DataMatrix& data,
                                  const AffinityGraph& graph,
                                  const HyperParams& hp) {
  if (s.W.rows() != data.dim() || s.Y.rows() != data.samples())
    throw std::invalid_argument("state dimensions do not match the data");

  // indicator terms
  if (s.F.size() > 0 && (s.F.minCoeff() < 0.0 || s.F.maxCoeff() > 1.0))
    return std::numeric_limits<double>::infinity();
  const Matrix gram = s.Yhat.transpose() * s.Yhat;
  if (max_abs_of(Matrix(gram - Matrix::Identity(gram.rows(), gram.cols()))) >
      kOrthTol)
    return std::numeric_limits<double>::infinity();

  const Matrix r1 = s.Y - data.X.transpose() * s.W - s.U;
  const Matrix r2 = s.V - s.W;
  const Matrix r3 = s.Y - s.F;
  const Matrix r4 = s.Yhat - s.Y;

  double value = (s.Y.transpose() * (graph.L * s.Y)).trace();
  value += hp.alpha * l21_norm(s.U);
  value += hp.beta * l21_norm(s.V);
  value += hp.gamma * s.W.squaredNorm();
  value += s.lambda.l1.cwiseProduct(r1).sum();
  value += s.lambda.l2.cwiseProduct(r2).sum();
  value += s.lambda.l3.cwiseProduct(r3).sum();
  value += s.lambda.l4.cwiseProduct(r4).sum();
  value += 0.5 * s.rho *
           (r1.squaredNorm() + r2.squaredNorm() + r3.squaredNorm() +
            r4.squaredNorm());
  return value;
}

double state_sq_distance(const SolverState& a, const SolverState& b) {
  return (a.W - b.W).squaredNorm() + (a.U - b.U).squaredNorm() +
         (a.V - b.V).squaredNorm() + (a.Y - b.Y).squaredNorm() +
         (a.F - b.F).squaredNorm() + (a.Yhat - b.Yhat).squaredNorm();
}

PamSolver::PamSolver(const DataMatrix& data, const AffinityGraph& graph,
                     HyperParams hp)
    : data_(data), graph_(graph), hp_(std::move(hp)) {
  hp_.validate();
  if (graph_.L.rows() != data_.samples())
    throw std::invalid_argument("graph Laplacian missing or mismatched");
  woodbury_ = data_.dim() > data_.samples();
  gram_ = woodbury_ ? Matrix(data_.X.transpose() * data_.X)
                    : Matrix(data_.X * data_.X.transpose());
}

void PamSolver::refresh_factorizations(double rho) {
  if (rho == cached_rho_) return;
  const double a = 2.0 * hp_.gamma + rho + hp_.prox;
  if (woodbury_) {
    const Index n = data_.samples();
    llt_w_.compute(Matrix::Identity(n, n) + (rho / a) * gram_);
  } else {
    const Index d = data_.dim();
    llt_w_.compute(a * Matrix::Identity(d, d) + rho * gram_);
  }
  const Index n = data_.samples();
  llt_y_.compute(2.0 * graph_.L +
                 (3.0 * rho + hp_.prox) * Matrix::Identity(n, n));
  cached_rho_ = rho;
}

Matrix PamSolver::update_W(const SolverState& s, double c1) {
  const double rho = s.rho;
  const double a = 2.0 * hp_.gamma + rho + c1;
  const Matrix Z = data_.X * s.lambda.l1 + s.lambda.l2 +
                   rho * (data_.X * (s.Y - s.U)) + rho * s.V + c1 * s.W;
  refresh_factorizations(rho);
  if (woodbury_) {
    // (a I + rho X X^T)^{-1} = I/a - (rho/a^2) X (I + (rho/a) X^T X)^{-1} X^T
    const Matrix T = llt_w_.solve(data_.X.transpose() * Z);
    return Z / a - (rho / (a * a)) * (data_.X * T);
  }
  return llt_w_.solve(Z);
}

Matrix PamSolver::update_U(const SolverState& s, double c2) const {
  const Matrix N =
      s.Y - data_.X.transpose() * s.W + s.lambda.l1 / s.rho;
  return group_threshold(N, s.U, s.rho, c2, hp_.alpha);
}

Matrix PamSolver::update_V(const SolverState& s, double c3) const {
  const Matrix M = s.W - s.lambda.l2 / s.rho;
  return group_threshold(M, s.V, s.rho, c3, hp_.beta);
}

Matrix PamSolver::update_Y(const SolverState& s, double c4) {
  const double rho = s.rho;
  const Matrix P = s.lambda.l4 - s.lambda.l3 - s.lambda.l1 +
                   rho * (data_.X.transpose() * s.W) + rho * s.U + rho * s.F +
                   rho * s.Yhat + c4 * s.Y;
  refresh_factorizations(rho);
  return llt_y_.solve(P);
}

Matrix PamSolver::update_F(const SolverState& s, double c5) const {
  const double rho = s.rho;
  // A = (rho (Y + lambda3/rho) + C F_prev) / (rho + C) written in delta
  // form, so a target equal to F_prev passes through exactly; then the
  // box projection
  Matrix A = s.F + (rho / (rho + c5)) * (s.Y + s.lambda.l3 / rho - s.F);
  kernels::clamp(A.data(), 0.0, 1.0, A.data(),
                 static_cast<std::size_t>(A.size()));
  return A;
}

Matrix PamSolver::update_Yhat(const SolverState& s, double c6,
                              bool* rank_deficient) const {
  const double rho = s.rho;
  const Index n = s.Yhat.rows();
  const Index c = s.Yhat.cols();
  Matrix B(n, c);
  kernels::lincomb3(rho / (rho + c6), s.Y.data(), -1.0 / (rho + c6),
                    s.lambda.l4.data(), c6 / (rho + c6), s.Yhat.data(),
                    B.data(), static_cast<std::size_t>(n * c));
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (rank_deficient != nullptr) {
    const auto& sv = svd.singularValues();
    *rank_deficient = sv(sv.size() - 1) <= sv(0) * 1e-14;
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

double PamSolver::lagrangian(const SolverState& s) const {
  return augmented_lagrangian_value(s, data_, graph_, hp_);
}

PamResult PamSolver::solve(SolverState& state, double eps_k) {
  if (!(eps_k > 0)) throw std::invalid_argument("eps_k must be positive");
  refresh_factorizations(state.rho);

  PamResult out;
  const double c = hp_.prox;
  double l_prev = lagrangian(state);

  for (int j = 1; j <= hp_.max_inner; ++j) {
    const SolverState prev = state;

    state.W = update_W(state, c);
    state.U = update_U(state, c);
    state.V = update_V(state, c);
    state.Y = update_Y(state, c);
    state.F = update_F(state, c);
    bool rank_warn = false;
    state.Yhat = update_Yhat(state, c, &rank_warn);
    if (rank_warn) ++out.rank_warnings;

    out.theta = compute_theta(prev, state, hp_, data_);
    out.theta_history.push_back(out.theta.inf_norm);
    out.sweeps = j;

    const double l_new = lagrangian(state);
    out.max_descent_violation =
        std::max(out.max_descent_violation,
                 l_new + 0.5 * c * state_sq_distance(prev, state) - l_prev);
    l_prev = l_new;

    if (out.theta.inf_norm <= eps_k) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace nofs
