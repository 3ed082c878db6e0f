#include "nofs/eval.hpp"

#include "nofs/kernels.hpp"
#include "nofs/rng.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace nofs {

namespace {

constexpr int kMaxLloydIterations = 300;

std::vector<int> dense_relabel(const std::vector<int>& labels, int* count) {
  std::map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] =
        remap.emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  *count = static_cast<int>(remap.size());
  return out;
}

// Exact minimum-cost assignment on a square cost matrix (O(n^3) potentials
// method). Returns for every column the row assigned to it.
std::vector<int> hungarian(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, inf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = 0;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_of_col(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j)
    row_of_col[static_cast<std::size_t>(j - 1)] =
        p[static_cast<std::size_t>(j)] - 1;
  return row_of_col;
}

struct LloydRun {
  std::vector<int> assignment;
  Matrix centers;  // q x c, one center per column while iterating
  double inertia = 0.0;
};

LloydRun lloyd_once(const Matrix& points, int c, std::uint64_t seed,
                    std::vector<double>* inertia_trace) {
  const Index q = points.rows();
  const Index n = points.cols();
  rng::Prng prng(seed);

  Matrix centers(q, c);
  const std::vector<Index> picks = rng::sample_without_replacement(
      n, static_cast<Index>(c), prng);
  for (int i = 0; i < c; ++i)
    centers.col(i) = points.col(picks[static_cast<std::size_t>(i)]);

  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  double inertia = 0.0;
  double prev_inertia = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < kMaxLloydIterations; ++iter) {
    // assignment step
    bool changed = false;
    inertia = 0.0;
    for (Index j = 0; j < n; ++j) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int i = 0; i < c; ++i) {
        const double d = kernels::squared_distance(
            points.col(j).data(), centers.col(i).data(),
            static_cast<std::size_t>(q));
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      if (assignment[static_cast<std::size_t>(j)] != best) changed = true;
      assignment[static_cast<std::size_t>(j)] = best;
      inertia += best_d;
    }
    if (inertia_trace) inertia_trace->push_back(inertia);
    assert(inertia <= prev_inertia + 1e-9 * (1.0 + prev_inertia));
    prev_inertia = inertia;
    if (!changed) break;

    // update step
    Matrix sums = Matrix::Zero(q, c);
    std::vector<Index> counts(static_cast<std::size_t>(c), 0);
    for (Index j = 0; j < n; ++j) {
      const int a = assignment[static_cast<std::size_t>(j)];
      sums.col(a) += points.col(j);
      ++counts[static_cast<std::size_t>(a)];
    }
    for (int i = 0; i < c; ++i) {
      if (counts[static_cast<std::size_t>(i)] > 0) {
        centers.col(i) =
            sums.col(i) / static_cast<double>(counts[static_cast<std::size_t>(i)]);
      } else {
        // empty cluster: re-seed at the point farthest from this center
        Index far = 0;
        double far_d = -1.0;
        for (Index j = 0; j < n; ++j) {
          const double d = kernels::squared_distance(
              points.col(j).data(), centers.col(i).data(),
              static_cast<std::size_t>(q));
          if (d > far_d) {
            far_d = d;
            far = j;
          }
        }
        centers.col(i) = points.col(far);
      }
    }
  }

  LloydRun run;
  run.assignment = std::move(assignment);
  run.centers = std::move(centers);
  run.inertia = inertia;
  return run;
}

double population_std(const std::vector<double>& xs, double mean) {
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return std::sqrt(std::max(acc / static_cast<double>(xs.size()), 0.0));
}

}  // namespace

ClusteringResult kmeans(const Matrix& points, int c, std::uint64_t seed,
                        int restarts, std::vector<double>* inertia_trace) {
  if (c < 1 || static_cast<Index>(c) > points.cols())
    throw std::invalid_argument("cluster count must satisfy 1 <= c <= n");
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");

  LloydRun best;
  std::vector<double> best_trace;
  bool have = false;
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> trace;
    LloydRun run = lloyd_once(points, c, rng::derive(seed, static_cast<std::uint64_t>(r)),
                              inertia_trace ? &trace : nullptr);
    if (!have || run.inertia < best.inertia) {
      best = std::move(run);
      best_trace = std::move(trace);
      have = true;
    }
  }
  if (inertia_trace) *inertia_trace = std::move(best_trace);

  ClusteringResult out;
  out.assignment = std::move(best.assignment);
  out.centers = best.centers.transpose();
  out.inertia = best.inertia;
  return out;
}

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size())
    throw std::invalid_argument("label vectors differ in length");
  if (y_true.empty()) throw std::invalid_argument("empty label vectors");

  int ct = 0, cp = 0;
  const std::vector<int> t = dense_relabel(y_true, &ct);
  const std::vector<int> p = dense_relabel(y_pred, &cp);
  const int m = std::max(ct, cp);

  Matrix counts = Matrix::Zero(m, m);  // pred x true
  for (std::size_t i = 0; i < t.size(); ++i)
    counts(p[i], t[i]) += 1.0;

  const std::vector<int> pred_of_true = hungarian(-counts);
  double matched = 0.0;
  for (int j = 0; j < m; ++j) matched += counts(pred_of_true[static_cast<std::size_t>(j)], j);
  return matched / static_cast<double>(t.size());
}

double nmi(const std::vector<int>& p_in, const std::vector<int>& q_in) {
  if (p_in.size() != q_in.size())
    throw std::invalid_argument("label vectors differ in length");
  if (p_in.empty()) throw std::invalid_argument("empty label vectors");
  // canonical argument order makes the result bit-symmetric
  if (std::lexicographical_compare(q_in.begin(), q_in.end(), p_in.begin(),
                                   p_in.end()))
    return nmi(q_in, p_in);

  int cp = 0, cq = 0;
  const std::vector<int> p = dense_relabel(p_in, &cp);
  const std::vector<int> q = dense_relabel(q_in, &cq);
  const auto n = static_cast<double>(p.size());

  Matrix joint = Matrix::Zero(cp, cq);
  for (std::size_t i = 0; i < p.size(); ++i) joint(p[i], q[i]) += 1.0;

  const Vector np = joint.rowwise().sum();
  const Vector nq = joint.colwise().sum();

  double hp = 0.0, hq = 0.0;
  for (Index i = 0; i < np.size(); ++i)
    if (np(i) > 0) hp -= np(i) / n * std::log(np(i) / n);
  for (Index j = 0; j < nq.size(); ++j)
    if (nq(j) > 0) hq -= nq(j) / n * std::log(nq(j) / n);

  if (hp == 0.0 || hq == 0.0) {
    // single-class labeling; identical partitions iff both are single-class
    return (hp == 0.0 && hq == 0.0) ? 1.0 : 0.0;
  }

  double mi = 0.0;
  for (Index i = 0; i < joint.rows(); ++i)
    for (Index j = 0; j < joint.cols(); ++j)
      if (joint(i, j) > 0)
        mi += joint(i, j) / n *
              std::log(n * joint(i, j) / (np(i) * nq(j)));

  return std::clamp(mi / std::sqrt(hp * hq), 0.0, 1.0);
}

MetricSummary evaluate(const Matrix& reduced, const std::vector<int>& labels,
                       int c, int repeats, std::uint64_t seed) {
  if (static_cast<Index>(labels.size()) != reduced.cols())
    throw std::invalid_argument("label vector length differs from sample count");
  if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");

  std::vector<double> accs, nmis;
  accs.reserve(static_cast<std::size_t>(repeats));
  nmis.reserve(static_cast<std::size_t>(repeats));
  for (int t = 0; t < repeats; ++t) {
    const ClusteringResult res =
        kmeans(reduced, c, rng::derive(seed, 0xe5a1 + static_cast<std::uint64_t>(t)));
    accs.push_back(accuracy(labels, res.assignment));
    nmis.push_back(nmi(labels, res.assignment));
  }

  MetricSummary out;
  out.runs = repeats;
  out.acc_mean = kernels::sum(accs.data(), accs.size()) / repeats;
  out.nmi_mean = kernels::sum(nmis.data(), nmis.size()) / repeats;
  out.acc_std = population_std(accs, out.acc_mean);
  out.nmi_std = population_std(nmis, out.nmi_mean);
  return out;
}

MetricSummary run_pipeline(const DataMatrix& data, const HyperParams& hp,
                           const PipelineConfig& pc, std::uint64_t seed) {
  if (!data.labels)
    throw std::invalid_argument("pipeline evaluation needs ground-truth labels");
  const AffinityGraph graph = build_graph(data, pc.k, pc.sigma);
  const AlmResult alm = alm_solve(data, graph, hp, seed);
  const FeatureRanking ranking = rank_features(alm.state.W);
  const Index q = std::min(pc.q > 0 ? pc.q : data.dim(), data.dim());
  const SelectedData sel = select_top(ranking, q, data);
  return evaluate(sel.data.X, *data.labels, data.c, pc.eval_repeats,
                  rng::derive(seed, 0x0e5a));
}

std::vector<RobustnessRow> robustness_protocol(
    const DataMatrix& data, const HyperParams& hp, const PipelineConfig& pc,
    const std::vector<double>& sigmas, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  for (double s : sigmas)
    if (s < 0) throw std::invalid_argument("noise levels must be nonnegative");

  std::vector<RobustnessRow> rows;
  rows.reserve(sigmas.size());
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    const double sigma = sigmas[si];
    RobustnessRow row;
    row.sigma = sigma;
    row.trials = trials;
    row.metrics.runs = pc.eval_repeats;
    if (sigma == 0.0) {
      // zero noise makes every trial identical; one run IS their exact mean
      row.metrics = run_pipeline(data, hp, pc, seed);
      rows.push_back(row);
      continue;
    }
    std::vector<double> am, as, nm, ns;
    for (int t = 0; t < trials; ++t) {
      DataMatrix noisy = data;
      rng::Prng prng(rng::derive(
          seed, 0x4015e ^ (si * 1009 + static_cast<std::size_t>(t))));
      noisy.X += sigma * rng::gaussian_matrix(data.dim(), data.samples(), prng);
      // the pipeline keeps the base seed; only the noise varies per trial
      const MetricSummary m = run_pipeline(noisy, hp, pc, seed);
      am.push_back(m.acc_mean);
      as.push_back(m.acc_std);
      nm.push_back(m.nmi_mean);
      ns.push_back(m.nmi_std);
    }
    row.metrics.acc_mean = kernels::sum(am.data(), am.size()) / trials;
    row.metrics.acc_std = kernels::sum(as.data(), as.size()) / trials;
    row.metrics.nmi_mean = kernels::sum(nm.data(), nm.size()) / trials;
    row.metrics.nmi_std = kernels::sum(ns.data(), ns.size()) / trials;
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> stability_eta(const OuterTrace& trace) {
  const std::size_t t = trace.w_history.size();
  if (t < 3)
    throw std::invalid_argument("stability ratio needs at least three iterates");
  std::vector<double> etas;
  etas.reserve(t - 2);
  for (std::size_t k = 1; k + 1 < t; ++k) {
    const double num = (trace.w_history[k + 1] - trace.w_history[k]).norm();
    const double den = (trace.w_history[k] - trace.w_history[k - 1]).norm();
    etas.push_back(den > 0 ? num / den : 0.0);
  }
  return etas;
}

}  // namespace nofs
