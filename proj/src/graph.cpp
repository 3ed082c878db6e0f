#include "nofs/graph.hpp"

#include "nofs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace nofs {

namespace {

// Lower triangle of pairwise squared distances, mirrored to full.
Matrix pairwise_squared_distances(const Matrix& X) {
  const Index n = X.cols();
  const Index d = X.rows();
  Matrix D2(n, n);
  for (Index i = 0; i < n; ++i) {
    D2(i, i) = 0.0;
    for (Index j = 0; j < i; ++j) {
      const double dist2 = kernels::squared_distance(
          X.col(i).data(), X.col(j).data(), static_cast<std::size_t>(d));
      D2(i, j) = dist2;
      D2(j, i) = dist2;
    }
  }
  return D2;
}

// Indices of the k nearest neighbors of sample i (self excluded), ties by
// lower index.
std::vector<Index> k_nearest(const Matrix& D2, Index i, int k) {
  const Index n = D2.rows();
  std::vector<Index> idx;
  idx.reserve(static_cast<std::size_t>(n - 1));
  for (Index j = 0; j < n; ++j)
    if (j != i) idx.push_back(j);
  const auto closer = [&](Index a, Index b) {
    if (D2(i, a) != D2(i, b)) return D2(i, a) < D2(i, b);
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), closer);
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

AffinityGraph build_knn_affinity(const DataMatrix& data, int k,
                                 std::optional<double> sigma) {
  const Index n = data.samples();
  if (k < 1 || k > n - 1)
    throw std::invalid_argument("neighbor count k must satisfy 1 <= k <= n-1");
  if (sigma && !(*sigma > 0))
    throw std::invalid_argument("bandwidth sigma must be positive");

  const Matrix D2 = pairwise_squared_distances(data.X);

  std::vector<std::vector<Index>> neighbors(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    neighbors[static_cast<std::size_t>(i)] = k_nearest(D2, i, k);

  double sig = 0.0;
  if (sigma) {
    sig = *sigma;
  } else {
    // mean over samples of the distance to the k-th nearest neighbor
    double acc = 0.0;
    for (Index i = 0; i < n; ++i)
      acc += std::sqrt(D2(i, neighbors[static_cast<std::size_t>(i)].back()));
    sig = acc / static_cast<double>(n);
    if (!(sig > 0))
      throw std::domain_error(
          "automatic bandwidth is degenerate: all k-th neighbor distances "
          "are zero (identical samples); pass sigma explicitly");
  }

  AffinityGraph g;
  g.k = k;
  g.sigma = sig;
  g.S = Matrix::Zero(n, n);
  const double inv = 1.0 / (2.0 * sig * sig);
  for (Index i = 0; i < n; ++i) {
    for (Index j : neighbors[static_cast<std::size_t>(i)]) {
      const double w = std::exp(-D2(i, j) * inv);
      g.S(i, j) = w;  // OR-rule: a single directed hit fills both entries
      g.S(j, i) = w;
    }
  }
  g.degrees = g.S.rowwise().sum();
  return g;
}

void normalized_laplacian(AffinityGraph& graph) {
  const Index n = graph.S.rows();
  // mirror the lower triangle so L is symmetric to the last bit; the
  // single sqrt of the degree product keeps S_ij / sqrt(D_i D_j) exact
  // when the weights cancel
  graph.L = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) {
      if (graph.S(i, j) == 0.0) continue;
      const double dd = graph.degrees(i) * graph.degrees(j);
      const double v = dd > 0 ? -graph.S(i, j) / std::sqrt(dd) : 0.0;
      graph.L(i, j) = v;
      graph.L(j, i) = v;
    }
    if (graph.degrees(j) > 0) graph.L(j, j) = 1.0;
  }
}

AffinityGraph build_graph(const DataMatrix& data, int k,
                          std::optional<double> sigma) {
  AffinityGraph g = build_knn_affinity(data, k, sigma);
  normalized_laplacian(g);
  return g;
}

}  // namespace nofs
