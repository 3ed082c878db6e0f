#pragma once

#include "nofs/alm.hpp"
#include "nofs/dataset.hpp"
#include "nofs/feature_select.hpp"
#include "nofs/graph.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace nofs {

struct ClusteringResult {
  std::vector<int> assignment;  // length n, labels in [0, c)
  Matrix centers;               // c x q, one center per row
  double inertia = 0.0;         // sum of squared distances to assigned centers
};

// Lloyd's algorithm on column-samples `points` (q x n), seeded random-point
// initialization, stopping at an assignment fixed point or 300 iterations.
// An empty cluster re-seeds its center at the point farthest from it. With
// restarts > 1 the best-inertia result over independently seeded runs wins.
// `inertia_trace` (when given) records the inertia after every assignment
// step of the winning run.
ClusteringResult kmeans(const Matrix& points, int c, std::uint64_t seed,
                        int restarts = 1,
                        std::vector<double>* inertia_trace = nullptr);

// Clustering accuracy: fraction of samples matched under the best injective
// mapping of predicted labels onto true labels (optimal assignment on the
// contingency matrix).
double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);

// Normalized mutual information I(P;Q) / sqrt(H(P) H(Q)). When either
// labeling has a single class the ratio is defined as 1 for identical
// partitions and 0 otherwise.
double nmi(const std::vector<int>& p, const std::vector<int>& q);

struct MetricSummary {
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double nmi_mean = 0.0;
  double nmi_std = 0.0;
  int runs = 0;
};

// Clusters `repeats` times with independently derived seeds and reports
// mean and population standard deviation of ACC and NMI against `labels`.
MetricSummary evaluate(const Matrix& reduced, const std::vector<int>& labels,
                       int c, int repeats, std::uint64_t seed);

// Everything a full selection-and-evaluation pass needs besides the data.
struct PipelineConfig {
  int k = 5;
  std::optional<double> sigma;  // nullopt = automatic bandwidth
  Index q = 0;                  // selected feature count
  int eval_repeats = 20;
};

// graph -> alm -> rank -> select q -> evaluate, all driven by one seed.
MetricSummary run_pipeline(const DataMatrix& data, const HyperParams& hp,
                           const PipelineConfig& pc, std::uint64_t seed);

struct RobustnessRow {
  double sigma = 0.0;
  MetricSummary metrics;  // per-trial metric summaries averaged over trials
  int trials = 0;
};

// Adds N(0, sigma^2) noise to X, reruns the full pipeline, and averages the
// reported metrics over `trials` noise draws per sigma. sigma = 0 skips the
// noise entirely so that row reproduces the noiseless run exactly.
std::vector<RobustnessRow> robustness_protocol(
    const DataMatrix& data, const HyperParams& hp, const PipelineConfig& pc,
    const std::vector<double>& sigmas, int trials, std::uint64_t seed);

// eta_k = ||W_{k+1} - W_k||_F / ||W_k - W_{k-1}||_F for k = 2..T-1, from the
// W snapshots stored in the trace; a zero denominator yields 0.
std::vector<double> stability_eta(const OuterTrace& trace);

}  // namespace nofs
