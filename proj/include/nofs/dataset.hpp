#pragma once

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nofs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Data matrix with samples as columns: X is d x n (features x samples).
// Labels are ground truth for evaluation only; the solver never sees them.
struct DataMatrix {
  Matrix X;
  int c = 0;  // target cluster count
  std::optional<std::vector<int>> labels;

  Index dim() const { return X.rows(); }
  Index samples() const { return X.cols(); }
};

// Validates d >= 1, n >= 2, 1 <= c <= n, all entries finite, label length.
DataMatrix make_data_matrix(Matrix X, int c,
                            std::optional<std::vector<int>> labels = {});

struct LoadOptions {
  std::optional<int> label_column;       // 0-based; negative counts from end
  std::optional<std::string> label_file; // one integer label per line
  bool has_header = false;
  char delimiter = '\0';                 // '\0' = auto-detect comma/tab
  std::optional<int> classes;            // overrides c derived from labels
  bool standardize = false;              // per-feature z-score after ingest
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Reads delimited text with one sample per line and assembles the d x n
// matrix (transposing the row-major sample layout). Non-finite values are
// rejected with the offending line and column.
DataMatrix load_dataset(const std::string& path, const LoadOptions& opts = {});

// In-place per-feature z-score; zero-variance features are centered only.
void standardize_features(Matrix& X);

}  // namespace nofs
