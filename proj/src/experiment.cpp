#include "nofs/experiment.hpp"

#include "nofs/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace nofs {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// q values actually evaluated: requested counts clamped to the dimension,
// falling back to all features when none fit.
std::vector<Index> usable_feature_counts(const std::vector<Index>& requested,
                                         Index d) {
  std::vector<Index> out;
  for (Index q : requested)
    if (q >= 1 && q <= d) out.push_back(q);
  if (out.empty()) out.push_back(d);
  return out;
}

RunReport build_report(const DataMatrix& data, const RunConfig& cfg,
                       FeatureRanking ranking, OuterTrace trace,
                       double graph_sigma) {
  RunReport report;
  report.ranking = std::move(ranking);
  report.trace = std::move(trace);
  report.graph_sigma = graph_sigma;
  if (data.labels) {
    for (Index q : usable_feature_counts(cfg.feature_counts, data.dim())) {
      const SelectedData sel = select_top(report.ranking, q, data);
      report.metrics.emplace_back(
          q, evaluate(sel.data.X, *data.labels, data.c, cfg.eval_repeats,
                      rng::derive(cfg.seed, 0x0e5a)));
    }
  }
  return report;
}

void write_run_outputs(const std::string& dir, const DataMatrix& data,
                       const RunConfig& cfg, const RunReport& report,
                       bool with_trace) {
  if (dir.empty()) return;
  fs::create_directories(dir);
  write_ranking(dir + "/ranking.txt", report.ranking);
  if (with_trace) write_trace_csv(dir + "/trace.csv", report.trace);
  write_metrics_json(dir + "/metrics.json", data, cfg, report);
}

}  // namespace

std::vector<double> default_grid_decades() {
  std::vector<double> out;
  for (int e = -6; e <= 6; ++e) out.push_back(std::pow(10.0, e));
  return out;
}

RunReport execute_run(const DataMatrix& data, const RunConfig& cfg) {
  const AffinityGraph graph = build_graph(data, cfg.k, cfg.sigma);
  const AlmResult alm = alm_solve(data, graph, cfg.hp, cfg.seed);
  RunReport report = build_report(data, cfg, rank_features(alm.state.W),
                                  alm.trace, graph.sigma);
  write_run_outputs(cfg.output_dir, data, cfg, report, /*with_trace=*/true);
  return report;
}

RunReport run_single(const RunConfig& cfg) {
  const DataMatrix data = load_dataset(cfg.dataset_path, cfg.load);
  return execute_run(data, cfg);
}

GridReport execute_grid(const DataMatrix& data, const RunConfig& cfg) {
  const std::vector<double> alphas =
      cfg.grid_alpha.empty() ? default_grid_decades() : cfg.grid_alpha;
  const std::vector<double> betas =
      cfg.grid_beta.empty() ? default_grid_decades() : cfg.grid_beta;
  const std::vector<double> gammas =
      cfg.grid_gamma.empty() ? std::vector<double>{1.0} : cfg.grid_gamma;

  struct Cell {
    double alpha, beta, gamma;
  };
  std::vector<Cell> cells;
  for (double a : alphas)
    for (double b : betas)
      for (double g : gammas) cells.push_back({a, b, g});
  if (cells.empty()) throw std::invalid_argument("empty grid");

  // the graph does not depend on the grid point; share it read-only
  const AffinityGraph graph = build_graph(data, cfg.k, cfg.sigma);
  const std::vector<Index> qs =
      usable_feature_counts(cfg.feature_counts, data.dim());

  std::vector<std::vector<GridRow>> cell_rows(cells.size());
  std::atomic<std::size_t> next{0};

  const auto run_cell = [&](std::size_t ci) {
    const Cell& cell = cells[ci];
    RunConfig cell_cfg = cfg;
    cell_cfg.hp.alpha = cell.alpha;
    cell_cfg.hp.beta = cell.beta;
    cell_cfg.hp.gamma = cell.gamma;
    cell_cfg.output_dir =
        cfg.output_dir.empty()
            ? std::string{}
            : cfg.output_dir + "/cell_a" + fmt_short(cell.alpha) + "_b" +
                  fmt_short(cell.beta) + "_g" + fmt_short(cell.gamma);
    std::vector<GridRow>& rows = cell_rows[ci];
    try {
      const AlmResult alm = alm_solve(data, graph, cell_cfg.hp, cell_cfg.seed);
      RunReport report =
          build_report(data, cell_cfg, rank_features(alm.state.W), alm.trace,
                       graph.sigma);
      write_run_outputs(cell_cfg.output_dir, data, cell_cfg, report,
                        /*with_trace=*/true);
      for (const auto& [q, m] : report.metrics)
        rows.push_back({cell.alpha, cell.beta, cell.gamma, q, m, true, {}});
      if (report.metrics.empty())  // unlabeled data still yields rows
        for (Index q : qs)
          rows.push_back({cell.alpha, cell.beta, cell.gamma, q, {}, true, {}});
    } catch (const std::exception& e) {
      for (Index q : qs)
        rows.push_back(
            {cell.alpha, cell.beta, cell.gamma, q, {}, false, e.what()});
    }
  };

  const int workers = std::max(1, std::min<int>(cfg.workers,
                                                static_cast<int>(cells.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) return;
          run_cell(i);
        }
      });
    for (auto& t : pool) t.join();
  }

  GridReport report;
  for (auto& rows : cell_rows)
    report.rows.insert(report.rows.end(), rows.begin(), rows.end());
  for (const GridRow& row : report.rows) {
    if (!row.ok) continue;
    if (!report.best_acc || row.metrics.acc_mean > report.best_acc->metrics.acc_mean)
      report.best_acc = row;
    if (!report.best_nmi || row.metrics.nmi_mean > report.best_nmi->metrics.nmi_mean)
      report.best_nmi = row;
  }

  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    write_grid_csv(cfg.output_dir + "/grid.csv", report);
  }
  return report;
}

GridReport run_grid(const RunConfig& cfg) {
  const DataMatrix data = load_dataset(cfg.dataset_path, cfg.load);
  return execute_grid(data, cfg);
}

std::vector<RobustnessRow> execute_robustness(const DataMatrix& data,
                                              const RunConfig& cfg) {
  PipelineConfig pc;
  pc.k = cfg.k;
  pc.sigma = cfg.sigma;
  pc.eval_repeats = cfg.eval_repeats;
  const std::vector<Index> qs =
      usable_feature_counts(cfg.feature_counts, data.dim());
  pc.q = qs.front();
  std::vector<RobustnessRow> rows =
      robustness_protocol(data, cfg.hp, pc, cfg.sigmas, cfg.trials, cfg.seed);
  if (!cfg.output_dir.empty()) {
    fs::create_directories(cfg.output_dir);
    write_robustness_csv(cfg.output_dir + "/robustness.csv", rows);
  }
  return rows;
}

std::vector<RobustnessRow> run_robustness(const RunConfig& cfg) {
  const DataMatrix data = load_dataset(cfg.dataset_path, cfg.load);
  return execute_robustness(data, cfg);
}

RunReport execute_baseline_maxvar(const DataMatrix& data,
                                  const RunConfig& cfg) {
  RunReport report =
      build_report(data, cfg, maxvar_rank(data), OuterTrace{}, 0.0);
  write_run_outputs(cfg.output_dir, data, cfg, report, /*with_trace=*/false);
  return report;
}

RunReport run_baseline_maxvar(const RunConfig& cfg) {
  const DataMatrix data = load_dataset(cfg.dataset_path, cfg.load);
  return execute_baseline_maxvar(data, cfg);
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  const fs::path tmp = target.parent_path() /
                       (target.filename().string() + ".tmp" +
                        std::to_string(static_cast<unsigned long>(::getpid())));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + tmp.string());
    out << contents;
    if (!out.good())
      throw std::runtime_error("short write to file: " + tmp.string());
  }
  fs::rename(tmp, target);
}

void write_ranking(const std::string& path, const FeatureRanking& ranking) {
  std::ostringstream out;
  for (Index idx : ranking.order) out << idx << '\n';
  write_file_atomic(path, out.str());
}

std::vector<Index> load_ranking(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open ranking file: " + path);
  std::vector<Index> order;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    order.push_back(static_cast<Index>(std::stoll(line)));
  }
  return order;
}

std::vector<TraceRow> trace_rows(const OuterTrace& trace) {
  std::vector<TraceRow> rows;
  rows.reserve(trace.records.size());
  for (const OuterRecord& r : trace.records) {
    rows.push_back({r.k, r.rho, r.eps, r.theta_inf, r.r_inf[0], r.r_inf[1],
                    r.r_inf[2], r.r_inf[3], r.inner_sweeps, r.lagrangian,
                    r.eta});
  }
  return rows;
}

void write_trace_csv(const std::string& path, const OuterTrace& trace) {
  std::ostringstream out;
  out << "k,rho,eps,theta_inf,r1,r2,r3,r4,inner_sweeps,L_value,eta\n";
  for (const TraceRow& r : trace_rows(trace)) {
    out << r.k << ',' << fmt_double(r.rho) << ',' << fmt_double(r.eps) << ','
        << fmt_double(r.theta_inf) << ',' << fmt_double(r.r1) << ','
        << fmt_double(r.r2) << ',' << fmt_double(r.r3) << ','
        << fmt_double(r.r4) << ',' << r.inner_sweeps << ','
        << fmt_double(r.l_value) << ',' << fmt_double(r.eta) << '\n';
  }
  write_file_atomic(path, out.str());
}

std::vector<TraceRow> load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open trace file: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ParseError("trace file is empty: " + path);
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 11)
      throw ParseError("malformed trace row: " + line);
    TraceRow r;
    r.k = std::stoi(cells[0]);
    r.rho = std::stod(cells[1]);
    r.eps = std::stod(cells[2]);
    r.theta_inf = std::stod(cells[3]);
    r.r1 = std::stod(cells[4]);
    r.r2 = std::stod(cells[5]);
    r.r3 = std::stod(cells[6]);
    r.r4 = std::stod(cells[7]);
    r.inner_sweeps = std::stoi(cells[8]);
    r.l_value = std::stod(cells[9]);
    r.eta = std::stod(cells[10]);
    rows.push_back(r);
  }
  return rows;
}

void write_metrics_json(const std::string& path, const DataMatrix& data,
                        const RunConfig& cfg, const RunReport& report) {
  json doc;
  doc["dataset"] = cfg.dataset_path;
  doc["seed"] = cfg.seed;
  doc["alpha"] = cfg.hp.alpha;
  doc["beta"] = cfg.hp.beta;
  doc["gamma"] = cfg.hp.gamma;
  doc["k"] = cfg.k;
  doc["sigma"] = report.graph_sigma;
  doc["c"] = data.c;
  doc["d"] = data.dim();
  doc["n"] = data.samples();
  doc["standardize"] = cfg.load.standardize;
  doc["eval_repeats"] = cfg.eval_repeats;
  doc["has_labels"] = data.labels.has_value();
  for (const auto& [q, m] : report.metrics) {
    const std::string p = "q" + std::to_string(q) + ".";
    doc[p + "acc_mean"] = m.acc_mean;
    doc[p + "acc_std"] = m.acc_std;
    doc[p + "nmi_mean"] = m.nmi_mean;
    doc[p + "nmi_std"] = m.nmi_std;
    doc[p + "runs"] = m.runs;
  }
  write_file_atomic(path, doc.dump(2) + "\n");
}

void write_grid_csv(const std::string& path, const GridReport& report) {
  std::ostringstream out;
  out << "alpha,beta,gamma,q,acc_mean,acc_std,nmi_mean,nmi_std,runs,status\n";
  for (const GridRow& r : report.rows) {
    out << fmt_double(r.alpha) << ',' << fmt_double(r.beta) << ','
        << fmt_double(r.gamma) << ',' << r.q << ',';
    if (r.ok) {
      out << fmt_double(r.metrics.acc_mean) << ','
          << fmt_double(r.metrics.acc_std) << ','
          << fmt_double(r.metrics.nmi_mean) << ','
          << fmt_double(r.metrics.nmi_std) << ',' << r.metrics.runs << ",ok\n";
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      out << ",,,,," << "error:" << msg << '\n';
    }
  }
  write_file_atomic(path, out.str());
}

void write_robustness_csv(const std::string& path,
                          const std::vector<RobustnessRow>& rows) {
  std::ostringstream out;
  out << "sigma,acc_mean,acc_std,nmi_mean,nmi_std,trials,runs\n";
  for (const RobustnessRow& r : rows) {
    out << fmt_double(r.sigma) << ',' << fmt_double(r.metrics.acc_mean) << ','
        << fmt_double(r.metrics.acc_std) << ','
        << fmt_double(r.metrics.nmi_mean) << ','
        << fmt_double(r.metrics.nmi_std) << ',' << r.trials << ','
        << r.metrics.runs << '\n';
  }
  write_file_atomic(path, out.str());
}

}  // namespace nofs
