#include "nofs/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace nofs {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

std::string location(std::size_t line, std::size_t col) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

char detect_delimiter(const std::string& line) {
  if (line.find(',') != std::string::npos) return ',';
  if (line.find('\t') != std::string::npos) return '\t';
  return ',';  // single-column files parse fine either way
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(cell);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

double parse_value(const std::string& cell, std::size_t line,
                   std::size_t col) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(cell, &pos);
  } catch (const std::exception&) {
    throw ParseError("could not parse numeric value '" + cell + "' at " +
                     location(line, col));
  }
  while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
    ++pos;
  if (pos != cell.size())
    throw ParseError("trailing characters in value '" + cell + "' at " +
                     location(line, col));
  if (!std::isfinite(v))
    throw ParseError("non-finite value '" + cell + "' at " +
                     location(line, col));
  return v;
}

int parse_label(const std::string& cell, std::size_t line, std::size_t col) {
  const double v = parse_value(cell, line, col);
  const double r = std::round(v);
  if (std::fabs(v - r) > 1e-9)
    throw ParseError("label is not an integer at " + location(line, col));
  return static_cast<int>(r);
}

std::vector<int> read_label_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open label file: " + path);
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    labels.push_back(parse_label(line, lineno, 1));
  }
  return labels;
}

}  // namespace

DataMatrix make_data_matrix(Matrix X, int c,
                            std::optional<std::vector<int>> labels) {
  if (X.rows() < 1) throw std::invalid_argument("need at least one feature");
  if (X.cols() < 2) throw std::invalid_argument("need at least two samples");
  if (c < 1 || c > X.cols())
    throw std::invalid_argument("cluster count must satisfy 1 <= c <= n");
  if (!all_finite(X))
    throw std::invalid_argument("data matrix contains non-finite entries");
  if (labels && static_cast<Index>(labels->size()) != X.cols())
    throw std::invalid_argument("label vector length differs from sample count");
  return DataMatrix{std::move(X), c, std::move(labels)};
}

void standardize_features(Matrix& X) {
  const double n = static_cast<double>(X.cols());
  for (Index i = 0; i < X.rows(); ++i) {
    const double mean = X.row(i).mean();
    X.row(i).array() -= mean;
    const double var = X.row(i).squaredNorm() / std::max(n - 1.0, 1.0);
    if (var > 0) X.row(i) /= std::sqrt(var);
  }
}

DataMatrix load_dataset(const std::string& path, const LoadOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open dataset file: " + path);

  std::vector<std::vector<double>> rows;   // one entry per sample
  std::vector<int> inline_labels;
  char delim = opts.delimiter;
  std::size_t lineno = 0;
  std::size_t width = 0;
  bool skipped_header = false;
  std::string line;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (delim == '\0') delim = detect_delimiter(line);
    if (opts.has_header && !skipped_header) {
      skipped_header = true;
      continue;
    }
    const std::vector<std::string> cells = split(line, delim);
    if (width == 0) {
      width = cells.size();
    } else if (cells.size() != width) {
      throw ParseError("expected " + std::to_string(width) + " columns, got " +
                       std::to_string(cells.size()) + " at line " +
                       std::to_string(lineno));
    }

    int label_col = -1;
    if (opts.label_column) {
      label_col = *opts.label_column;
      if (label_col < 0) label_col += static_cast<int>(width);
      if (label_col < 0 || label_col >= static_cast<int>(width))
        throw ParseError("label column out of range at line " +
                         std::to_string(lineno));
    }

    std::vector<double> sample;
    sample.reserve(width);
    for (std::size_t j = 0; j < width; ++j) {
      if (static_cast<int>(j) == label_col) {
        inline_labels.push_back(parse_label(cells[j], lineno, j + 1));
      } else {
        sample.push_back(parse_value(cells[j], lineno, j + 1));
      }
    }
    rows.push_back(std::move(sample));
  }

  if (rows.empty()) throw ParseError("dataset file is empty: " + path);
  const Index n = static_cast<Index>(rows.size());
  const Index d = static_cast<Index>(rows.front().size());
  if (d == 0) throw ParseError("no feature columns in: " + path);

  Matrix X(d, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < d; ++i)
      X(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];

  std::optional<std::vector<int>> labels;
  if (opts.label_file) {
    labels = read_label_file(*opts.label_file);
    if (static_cast<Index>(labels->size()) != n)
      throw ParseError("label file has " + std::to_string(labels->size()) +
                       " entries for " + std::to_string(n) + " samples");
  } else if (!inline_labels.empty()) {
    labels = std::move(inline_labels);
  }

  int c = 0;
  if (opts.classes) {
    c = *opts.classes;
  } else if (labels) {
    c = static_cast<int>(std::set<int>(labels->begin(), labels->end()).size());
  } else {
    c = 2;  // placeholder; callers that cluster must set a real c
  }

  if (opts.standardize) standardize_features(X);
  return make_data_matrix(std::move(X), c, std::move(labels));
}

}  // namespace nofs
