#pragma once

#include "nofs/eval.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace nofs {

// Everything a run needs, mirrored one-to-one by the CLI flags. A single
// seed drives every random draw downstream (solver init, K-means, noise).
struct RunConfig {
  std::string dataset_path;
  LoadOptions load;

  int k = 5;
  std::optional<double> sigma;  // nullopt = automatic bandwidth

  HyperParams hp;

  std::vector<Index> feature_counts = {50, 100, 150, 200, 250, 300};
  int eval_repeats = 20;
  std::uint64_t seed = 0;
  std::string output_dir;  // empty = no files written

  // grid search
  std::vector<double> grid_alpha;
  std::vector<double> grid_beta;
  std::vector<double> grid_gamma;
  int workers = 1;

  // robustness protocol
  std::vector<double> sigmas = {0.0, 0.5, 1.0, 1.5, 2.0};
  int trials = 10;
};

// Default grid: alpha and beta over the thirteen powers of ten in
// [1e-6, 1e6], gamma fixed at 1.
std::vector<double> default_grid_decades();

struct RunReport {
  FeatureRanking ranking;
  OuterTrace trace;
  std::vector<std::pair<Index, MetricSummary>> metrics;  // per evaluated q
  double graph_sigma = 0.0;  // resolved bandwidth
};

// graph -> alm_solve -> rank_features -> select_top/evaluate per q; writes
// ranking.txt, trace.csv and metrics.json into cfg.output_dir when set.
// Evaluation is skipped (not an error) when the data has no labels.
RunReport execute_run(const DataMatrix& data, const RunConfig& cfg);
RunReport run_single(const RunConfig& cfg);

struct GridRow {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  Index q = 0;
  MetricSummary metrics;
  bool ok = true;
  std::string error;
};

struct GridReport {
  std::vector<GridRow> rows;
  std::optional<GridRow> best_acc;
  std::optional<GridRow> best_nmi;
};

// One solve per (alpha, beta, gamma) cell, one row per (cell, q). Cells run
// concurrently up to cfg.workers; a failing cell is recorded in its rows and
// the grid continues. Writes per-cell run outputs plus grid.csv.
GridReport execute_grid(const DataMatrix& data, const RunConfig& cfg);
GridReport run_grid(const RunConfig& cfg);

// Noise sweep over cfg.sigmas with cfg.trials draws each; writes
// robustness.csv when an output directory is set.
std::vector<RobustnessRow> execute_robustness(const DataMatrix& data,
                                              const RunConfig& cfg);
std::vector<RobustnessRow> run_robustness(const RunConfig& cfg);

// Maximum-variance baseline: same outputs as execute_run minus the trace.
RunReport execute_baseline_maxvar(const DataMatrix& data, const RunConfig& cfg);
RunReport run_baseline_maxvar(const RunConfig& cfg);

// --- serialization ---------------------------------------------------

// Ranking file: one 0-based feature index per line, best first.
void write_ranking(const std::string& path, const FeatureRanking& ranking);
std::vector<Index> load_ranking(const std::string& path);

struct TraceRow {
  int k = 0;
  double rho = 0.0;
  double eps = 0.0;
  double theta_inf = 0.0;
  double r1 = 0.0, r2 = 0.0, r3 = 0.0, r4 = 0.0;
  int inner_sweeps = 0;
  double l_value = 0.0;
  double eta = 0.0;

  bool operator==(const TraceRow&) const = default;
};

std::vector<TraceRow> trace_rows(const OuterTrace& trace);
void write_trace_csv(const std::string& path, const OuterTrace& trace);
std::vector<TraceRow> load_trace_csv(const std::string& path);

void write_metrics_json(const std::string& path, const DataMatrix& data,
                        const RunConfig& cfg, const RunReport& report);

void write_grid_csv(const std::string& path, const GridReport& report);
void write_robustness_csv(const std::string& path,
                          const std::vector<RobustnessRow>& rows);

// Atomic text write (temp file in the same directory, then rename).
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace nofs
