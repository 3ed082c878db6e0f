#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nofs/feature_select.hpp"
#include "support/test_support.hpp"

using namespace nofs;

TEST_CASE("identity W ranks by index tie-break") {
  const FeatureRanking r = rank_features(Matrix::Identity(3, 3));
  CHECK(r.scores(0) == 1.0);
  CHECK(r.scores(1) == 1.0);
  CHECK(r.scores(2) == 1.0);
  CHECK(r.order == std::vector<Index>{0, 1, 2});
}

TEST_CASE("row norms drive the order") {
  Matrix W(3, 2);
  W << 0.0, 0.0,
       3.0, 4.0,
       1.0, 0.0;
  const FeatureRanking r = rank_features(W);
  CHECK(r.scores(0) == 0.0);
  CHECK(r.scores(1) == 5.0);
  CHECK(r.scores(2) == 1.0);
  CHECK(r.order == std::vector<Index>{1, 2, 0});
}

TEST_CASE("scaling W leaves the order unchanged") {
  const Matrix W = testsup::random_matrix(10, 3, 5);
  CHECK(rank_features(W).order == rank_features(Matrix(2.0 * W)).order);
}

TEST_CASE("ranking is invariant under right-orthogonal transforms") {
  const Matrix W = testsup::random_matrix(12, 4, 6);
  const Matrix Q = testsup::random_orthonormal(4, 4, 7);
  const FeatureRanking a = rank_features(W);
  const FeatureRanking b = rank_features(Matrix(W * Q));
  CHECK(a.order == b.order);
  for (Index i = 0; i < a.scores.size(); ++i)
    CHECK(a.scores(i) == doctest::Approx(b.scores(i)).epsilon(1e-10));
}

TEST_CASE("select_top keeps rows in ranking order with metadata") {
  const DataMatrix data = testsup::make_blobs(5, 8, 2, 2.0, 9);
  Matrix W(5, 2);
  W << 1, 0,
       5, 0,
       3, 0,
       4, 0,
       2, 0;
  const FeatureRanking r = rank_features(W);
  CHECK(r.order == std::vector<Index>{1, 3, 2, 4, 0});

  const SelectedData top1 = select_top(r, 1, data);
  CHECK(top1.features == std::vector<Index>{1});
  CHECK((top1.data.X.row(0) - data.X.row(1)).norm() == 0.0);

  const SelectedData all = select_top(r, 5, data);
  CHECK(all.data.X.rows() == 5);
  for (Index i = 0; i < 5; ++i)
    CHECK((all.data.X.row(i) - data.X.row(all.features[static_cast<std::size_t>(i)])).norm() == 0.0);
  CHECK(all.data.c == data.c);
  CHECK(all.data.labels == data.labels);

  CHECK_THROWS_AS(select_top(r, 0, data), std::invalid_argument);
  CHECK_THROWS_AS(select_top(r, 6, data), std::invalid_argument);
}

TEST_CASE("select_top of rank_features is deterministic") {
  const DataMatrix data = testsup::make_blobs(7, 9, 3, 2.0, 10);
  const Matrix W = testsup::random_matrix(7, 3, 11);
  const SelectedData a = select_top(rank_features(W), 4, data);
  const SelectedData b = select_top(rank_features(W), 4, data);
  CHECK(a.features == b.features);
  CHECK((a.data.X - b.data.X).norm() == 0.0);
}

TEST_CASE("maxvar ranks by unbiased variance with stable ties") {
  Matrix X(3, 2);
  X << 0.0, 2.0,   // variance 2 with divisor n-1
       0.0, 1.0,   // variance 0.5
       7.0, 7.0;   // constant feature
  const DataMatrix data = make_data_matrix(std::move(X), 2);
  const FeatureRanking r = maxvar_rank(data);
  CHECK(r.scores(0) == doctest::Approx(2.0));
  CHECK(r.scores(1) == doctest::Approx(0.5));
  CHECK(r.scores(2) == 0.0);
  CHECK(r.order == std::vector<Index>{0, 1, 2});

  // duplicate features end up adjacent in index order
  Matrix D(3, 3);
  D << 1.0, 2.0, 3.0,
       5.0, 0.0, 1.0,
       1.0, 2.0, 3.0;
  const DataMatrix dup = make_data_matrix(std::move(D), 2);
  const FeatureRanking rd = maxvar_rank(dup);
  CHECK(rd.scores(0) == rd.scores(2));
  const auto pos = [&](Index f) {
    return std::find(rd.order.begin(), rd.order.end(), f) - rd.order.begin();
  };
  CHECK(pos(0) + 1 == pos(2));
}
