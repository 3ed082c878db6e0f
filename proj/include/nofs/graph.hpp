#pragma once

#include "nofs/dataset.hpp"

#include <optional>

namespace nofs {

// Similarity graph over samples. S is dense (target datasets stay in the
// low thousands of samples), symmetric, nonnegative, zero-diagonal.
struct AffinityGraph {
  Matrix S;        // n x n affinity
  Vector degrees;  // D_ii = sum_j S_ij
  Matrix L;        // normalized Laplacian, empty until normalized_laplacian()
  int k = 0;
  double sigma = 0.0;
};

// Gaussian k-NN affinity: S_ij = exp(-||x_i - x_j||^2 / (2 sigma^2)) when
// x_i is among the k nearest neighbors of x_j or vice versa, else 0. A
// sample is never its own neighbor; ties break toward the lower index.
// sigma = nullopt picks the mean distance to the k-th nearest neighbor.
AffinityGraph build_knn_affinity(const DataMatrix& data, int k,
                                 std::optional<double> sigma = std::nullopt);

// Fills L = D^{-1/2} (D - S) D^{-1/2}. Isolated nodes (zero degree) use the
// convention D_ii^{-1/2} = 0, zeroing their row and column.
void normalized_laplacian(AffinityGraph& graph);

// build + normalize in one step
AffinityGraph build_graph(const DataMatrix& data, int k,
                          std::optional<double> sigma = std::nullopt);

}  // namespace nofs
