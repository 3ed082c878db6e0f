#include "nofs/feature_select.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace nofs {

namespace {

FeatureRanking rank_by_scores(Vector scores) {
  FeatureRanking r;
  r.order.resize(static_cast<std::size_t>(scores.size()));
  std::iota(r.order.begin(), r.order.end(), Index{0});
  std::sort(r.order.begin(), r.order.end(), [&](Index a, Index b) {
    if (scores(a) != scores(b)) return scores(a) > scores(b);
    return a < b;
  });
  r.scores = std::move(scores);
  r.q = r.scores.size();
  return r;
}

}  // namespace

FeatureRanking rank_features(const Matrix& W) {
  if (!W.allFinite())
    throw std::invalid_argument("W contains non-finite entries");
  return rank_by_scores(W.rowwise().norm());
}

FeatureRanking maxvar_rank(const DataMatrix& data) {
  const Index n = data.samples();
  if (n < 2) throw std::invalid_argument("variance needs at least two samples");
  Vector scores(data.dim());
  for (Index i = 0; i < data.dim(); ++i) {
    const double mean = data.X.row(i).mean();
    scores(i) = (data.X.row(i).array() - mean).matrix().squaredNorm() /
                static_cast<double>(n - 1);
  }
  return rank_by_scores(std::move(scores));
}

SelectedData select_top(const FeatureRanking& ranking, Index q,
                        const DataMatrix& data) {
  const Index d = data.dim();
  if (q < 1 || q > d)
    throw std::invalid_argument("selected count q must satisfy 1 <= q <= d");
  if (static_cast<Index>(ranking.order.size()) != d)
    throw std::invalid_argument("ranking does not match the data dimension");

  SelectedData out;
  out.features.assign(ranking.order.begin(), ranking.order.begin() + q);
  Matrix reduced(q, data.samples());
  for (Index i = 0; i < q; ++i)
    reduced.row(i) = data.X.row(out.features[static_cast<std::size_t>(i)]);
  out.data.X = std::move(reduced);
  out.data.c = data.c;
  out.data.labels = data.labels;
  return out;
}

}  // namespace nofs
