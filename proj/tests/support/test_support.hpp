#pragma once

// Shared helpers for the test suites: independent plain-loop oracles for
// the objective values, data generators, and brute-force references. These
// deliberately avoid the library's own computation paths wherever they act
// as an oracle.

#include "nofs/alm.hpp"
#include "nofs/dataset.hpp"
#include "nofs/graph.hpp"
#include "nofs/rng.hpp"
#include "nofs/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace testsup {

using nofs::DataMatrix;
using nofs::HyperParams;
using nofs::Index;
using nofs::Matrix;
using nofs::SolverState;
using nofs::Vector;

// ---- plain-loop norms -------------------------------------------------

inline double loop_frob_sq(const Matrix& m) {
  double acc = 0.0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) acc += m(i, j) * m(i, j);
  return acc;
}

inline double loop_l21(const Matrix& m) {
  double acc = 0.0;
  for (Index i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (Index j = 0; j < m.cols(); ++j) row += m(i, j) * m(i, j);
    acc += std::sqrt(row);
  }
  return acc;
}

inline double loop_inner(const Matrix& a, const Matrix& b) {
  double acc = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) acc += a(i, j) * b(i, j);
  return acc;
}

// ---- independent augmented Lagrangian ----------------------------------

// Term-by-term recomputation with explicit loops. Indicator terms are not
// applied here; callers pass feasible states.
inline double naive_lagrangian(const SolverState& s, const Matrix& X,
                               const Matrix& L, const HyperParams& hp) {
  const Index n = s.Y.rows();
  const Index c = s.Y.cols();
  const Index d = s.W.rows();

  Matrix XtW = Matrix::Zero(n, c);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < c; ++j)
      for (Index l = 0; l < d; ++l) XtW(i, j) += X(l, i) * s.W(l, j);

  const Matrix r1 = s.Y - XtW - s.U;
  const Matrix r2 = s.V - s.W;
  const Matrix r3 = s.Y - s.F;
  const Matrix r4 = s.Yhat - s.Y;

  double tr = 0.0;  // Tr(Y^T L Y)
  for (Index j = 0; j < c; ++j)
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) tr += s.Y(a, j) * L(a, b) * s.Y(b, j);

  double value = tr;
  value += hp.alpha * loop_l21(s.U);
  value += hp.beta * loop_l21(s.V);
  value += hp.gamma * loop_frob_sq(s.W);
  value += loop_inner(s.lambda.l1, r1);
  value += loop_inner(s.lambda.l2, r2);
  value += loop_inner(s.lambda.l3, r3);
  value += loop_inner(s.lambda.l4, r4);
  value += 0.5 * s.rho *
           (loop_frob_sq(r1) + loop_frob_sq(r2) + loop_frob_sq(r3) +
            loop_frob_sq(r4));
  return value;
}

// Subproblem objective for one block: Lagrangian at the mid-sweep state
// with `candidate` substituted, plus the proximal anchor at `anchor`.
enum class Block { W, U, V, Y, F, Yhat };

inline double block_objective(Block which, const SolverState& mid,
                              const Matrix& candidate, const Matrix& anchor,
                              const Matrix& X, const Matrix& L,
                              const HyperParams& hp, double prox_c) {
  SolverState s = mid;
  switch (which) {
    case Block::W: s.W = candidate; break;
    case Block::U: s.U = candidate; break;
    case Block::V: s.V = candidate; break;
    case Block::Y: s.Y = candidate; break;
    case Block::F: s.F = candidate; break;
    case Block::Yhat: s.Yhat = candidate; break;
  }
  return naive_lagrangian(s, X, L, hp) +
         0.5 * prox_c * loop_frob_sq(candidate - anchor);
}

// Central finite-difference gradient of the block objective.
inline Matrix fd_gradient(Block which, const SolverState& mid,
                          const Matrix& at, const Matrix& anchor,
                          const Matrix& X, const Matrix& L,
                          const HyperParams& hp, double prox_c,
                          double h = 1e-5) {
  Matrix g(at.rows(), at.cols());
  Matrix probe = at;
  for (Index j = 0; j < at.cols(); ++j) {
    for (Index i = 0; i < at.rows(); ++i) {
      probe(i, j) = at(i, j) + h;
      const double fp = block_objective(which, mid, probe, anchor, X, L, hp, prox_c);
      probe(i, j) = at(i, j) - h;
      const double fm = block_objective(which, mid, probe, anchor, X, L, hp, prox_c);
      probe(i, j) = at(i, j);
      g(i, j) = (fp - fm) / (2.0 * h);
    }
  }
  return g;
}

// ---- generators ---------------------------------------------------------

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  nofs::rng::Prng prng(seed);
  return nofs::rng::gaussian_matrix(rows, cols, prng);
}

inline Matrix random_orthonormal(Index n, Index c, std::uint64_t seed) {
  const Matrix g = random_matrix(n, c, seed);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(n, c);
}

// Random feasible solver state with multipliers and penalty.
inline SolverState random_state(Index d, Index n, Index c,
                                std::uint64_t seed, double rho = 2.0) {
  SolverState s;
  s.W = random_matrix(d, c, seed + 1);
  s.U = random_matrix(n, c, seed + 2);
  s.V = random_matrix(d, c, seed + 3);
  s.Y = random_matrix(n, c, seed + 4);
  s.F = random_matrix(n, c, seed + 5).cwiseAbs().cwiseMin(1.0);
  s.Yhat = random_orthonormal(n, c, seed + 6);
  s.lambda.l1 = random_matrix(n, c, seed + 7);
  s.lambda.l2 = random_matrix(d, c, seed + 8);
  s.lambda.l3 = random_matrix(n, c, seed + 9);
  s.lambda.l4 = random_matrix(n, c, seed + 10);
  s.rho = rho;
  return s;
}

// Gaussian blobs in every dimension; labels round-robin.
inline DataMatrix make_blobs(Index d, Index n, int c, double separation,
                             std::uint64_t seed) {
  nofs::rng::Prng prng(seed);
  const Matrix centers = separation * nofs::rng::gaussian_matrix(d, c, prng);
  Matrix X(d, n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const int g = static_cast<int>(j % c);
    labels[static_cast<std::size_t>(j)] = g;
    for (Index i = 0; i < d; ++i) X(i, j) = centers(i, g) + prng.gaussian();
  }
  return nofs::make_data_matrix(std::move(X), c, std::move(labels));
}

// Clusters separated only in a fixed subset of features; the rest is pure
// noise. Informative indices are spread across the dimension range.
struct Planted {
  DataMatrix data;
  std::vector<Index> informative;
};

inline Planted make_planted(std::uint64_t seed, Index d = 100, Index n = 150,
                            int c = 3, Index n_inf = 10, double delta = 3.0,
                            double noise_sigma = 1.0) {
  Planted out;
  for (Index i = 0; i < n_inf; ++i)
    out.informative.push_back((i * d) / n_inf + d / (2 * n_inf));

  nofs::rng::Prng prng(seed);
  Matrix X(d, n);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    const int g = static_cast<int>(j % c);
    labels[static_cast<std::size_t>(j)] = g;
    for (Index i = 0; i < d; ++i) X(i, j) = noise_sigma * prng.gaussian();
    for (std::size_t t = 0; t < out.informative.size(); ++t) {
      const Index f = out.informative[t];
      // informative features carry unit sample noise plus the cluster shift
      X(f, j) = prng.gaussian();
      if (static_cast<int>(t % static_cast<std::size_t>(c)) == g)
        X(f, j) += delta;
    }
  }
  out.data = nofs::make_data_matrix(std::move(X), c, std::move(labels));
  return out;
}

// ---- brute-force metric references -------------------------------------

// Maximum matched count over all injective maps of predicted labels onto
// true labels (padded square, permutation enumeration).
inline double brute_force_accuracy(const std::vector<int>& y_true,
                                   const std::vector<int>& y_pred) {
  std::vector<int> tvals(y_true), pvals(y_pred);
  std::sort(tvals.begin(), tvals.end());
  tvals.erase(std::unique(tvals.begin(), tvals.end()), tvals.end());
  std::sort(pvals.begin(), pvals.end());
  pvals.erase(std::unique(pvals.begin(), pvals.end()), pvals.end());
  const int m = static_cast<int>(std::max(tvals.size(), pvals.size()));

  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(m, m);  // pred x true
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const int p = static_cast<int>(
        std::lower_bound(pvals.begin(), pvals.end(), y_pred[i]) - pvals.begin());
    const int t = static_cast<int>(
        std::lower_bound(tvals.begin(), tvals.end(), y_true[i]) - tvals.begin());
    counts(p, t) += 1;
  }

  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  int best = 0;
  do {
    int matched = 0;
    for (int p = 0; p < m; ++p) matched += counts(p, perm[static_cast<std::size_t>(p)]);
    best = std::max(best, matched);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(y_true.size());
}

}  // namespace testsup
