#pragma once

#include "nofs/dataset.hpp"

#include <vector>

namespace nofs {

// Feature scores with the descending-score order; ties break toward the
// lower feature index.
struct FeatureRanking {
  Vector scores;              // length d
  std::vector<Index> order;   // permutation of [0, d)
  Index q = 0;                // selected count, d until select_top narrows it
};

// Scores are the row norms ||W_i||_2 of the learned transformation.
FeatureRanking rank_features(const Matrix& W);

// Scores are per-feature sample variances (unbiased, divisor n - 1).
FeatureRanking maxvar_rank(const DataMatrix& data);

// Rows of X restricted to the top q ranked features.
struct SelectedData {
  DataMatrix data;              // q x n, labels and c carried over
  std::vector<Index> features;  // original feature indices, ranking order
};

SelectedData select_top(const FeatureRanking& ranking, Index q,
                        const DataMatrix& data);

}  // namespace nofs
