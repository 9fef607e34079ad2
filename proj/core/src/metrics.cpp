#include "egodoa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace egodoa {

namespace {

void check_pairs(const std::vector<double>& preds,
                 const std::vector<double>& gts) {
  if (preds.empty()) throw std::invalid_argument("metrics: empty input");
  if (preds.size() != gts.size()) {
    throw std::invalid_argument("metrics: prediction/ground-truth size mismatch");
  }
}

}  // namespace

double accuracy_at(const std::vector<double>& preds_deg,
                   const std::vector<double>& gts_deg, double threshold_deg) {
  check_pairs(preds_deg, gts_deg);
  int correct = 0;
  for (size_t i = 0; i < preds_deg.size(); ++i) {
    if (cyclic_abs_error(preds_deg[i], gts_deg[i]) < threshold_deg) ++correct;
  }
  return 100.0 * correct / static_cast<double>(preds_deg.size());
}

double mean_abs_error(const std::vector<double>& preds_deg,
                      const std::vector<double>& gts_deg) {
  check_pairs(preds_deg, gts_deg);
  double sum = 0.0;
  for (size_t i = 0; i < preds_deg.size(); ++i) {
    sum += cyclic_abs_error(preds_deg[i], gts_deg[i]);
  }
  return sum / static_cast<double>(preds_deg.size());
}

std::vector<HistogramBin> error_histogram(const std::vector<double>& preds_deg,
                                          const std::vector<double>& gts_deg) {
  check_pairs(preds_deg, gts_deg);
  std::vector<HistogramBin> bins(360);
  std::vector<double> sums(360, 0.0);
  for (size_t i = 0; i < preds_deg.size(); ++i) {
    const int b = static_cast<int>(wrap_deg(std::round(gts_deg[i]))) % 360;
    sums[b] += cyclic_abs_error(preds_deg[i], gts_deg[i]);
    ++bins[b].count;
  }
  for (int b = 0; b < 360; ++b) {
    if (bins[b].count > 0) bins[b].mean_ae_deg = sums[b] / bins[b].count;
  }
  return bins;
}

SpherePoint cell_to_sphere(int row, int col) {
  return SpherePoint{col * 2.0 + 1.0, row * 2.0 - 89.0};
}

std::vector<Detection> nms_sphere(const Eigen::MatrixXd& map, double radius,
                                  double threshold) {
  const int rows = static_cast<int>(map.rows());
  const int cols = static_cast<int>(map.cols());
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> suppressed =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(rows, cols,
                                                                    false);
  std::vector<Detection> out;
  const int r_int = static_cast<int>(std::ceil(radius));

  for (;;) {
    double best = threshold;
    int br = -1, bc = -1;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (!suppressed(r, c) && map(r, c) > best) {
          best = map(r, c);
          br = r;
          bc = c;
        }
      }
    }
    if (br < 0) break;

    Detection d;
    d.row = br;
    d.col = bc;
    d.score = best;
    d.point = cell_to_sphere(br, bc);
    out.push_back(d);

    for (int dr = -r_int; dr <= r_int; ++dr) {
      const int r = br + dr;
      if (r < 0 || r >= rows) continue;
      for (int dc = -r_int; dc <= r_int; ++dc) {
        // Azimuth wraps around the grid; elevation does not.
        int c = ((bc + dc) % cols + cols) % cols;
        int wrap_dc = std::abs(dc) > cols / 2 ? cols - std::abs(dc)
                                              : std::abs(dc);
        if (std::sqrt(static_cast<double>(dr * dr + wrap_dc * wrap_dc)) <=
            radius) {
          suppressed(r, c) = true;
        }
      }
    }
  }
  return out;
}

Assignment hungarian_match(const Eigen::MatrixXd& cost) {
  const int p = static_cast<int>(cost.rows());
  const int g = static_cast<int>(cost.cols());
  Assignment result;
  if (p == 0 || g == 0) {
    for (int i = 0; i < p; ++i) result.unmatched_rows.push_back(i);
    for (int j = 0; j < g; ++j) result.unmatched_cols.push_back(j);
    return result;
  }
  if (!cost.allFinite()) {
    throw std::invalid_argument("hungarian_match: non-finite costs");
  }

  // Potentials method on a square matrix padded with zero-cost dummies.
  const int n = std::max(p, g);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  a.block(1, 1, p, g) = cost;

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);

  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_of_col(n + 1);
  for (int j = 1; j <= n; ++j) row_of_col[j] = match[j];

  std::vector<bool> row_matched(p, false), col_matched(g, false);
  for (int j = 1; j <= g; ++j) {
    const int i = row_of_col[j];
    if (i >= 1 && i <= p) {
      result.matches.emplace_back(i - 1, j - 1);
      result.total_cost += cost(i - 1, j - 1);
      row_matched[i - 1] = true;
      col_matched[j - 1] = true;
    }
  }
  std::sort(result.matches.begin(), result.matches.end());
  for (int i = 0; i < p; ++i) {
    if (!row_matched[i]) result.unmatched_rows.push_back(i);
  }
  for (int j = 0; j < g; ++j) {
    if (!col_matched[j]) result.unmatched_cols.push_back(j);
  }
  return result;
}

namespace {

void mean_std(const std::vector<double>& xs, double* mean, double* stddev) {
  if (xs.empty()) {
    *mean = 0.0;
    *stddev = 0.0;
    return;
  }
  const double m =
      std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - m) * (x - m);
  *mean = m;
  *stddev = std::sqrt(var / static_cast<double>(xs.size()));
}

}  // namespace

E1E2Stats mean_e1_e2(const std::vector<Detection>& preds,
                     const std::vector<SpherePoint>& gts) {
  constexpr double kMaxDistance = 180.0;
  const int p = static_cast<int>(preds.size());
  const int g = static_cast<int>(gts.size());

  Eigen::MatrixXd cost(p, g);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < g; ++j) {
      cost(i, j) = great_circle_deg(preds[i].point, gts[j]);
    }
  }
  const Assignment match = hungarian_match(cost);

  std::vector<double> e1(p, kMaxDistance), e2(g, kMaxDistance);
  for (const auto& [i, j] : match.matches) {
    e1[i] = cost(i, j);
    e2[j] = cost(i, j);
  }

  E1E2Stats stats;
  stats.matched = static_cast<int>(match.matches.size());
  mean_std(e1, &stats.mean_e1, &stats.std1);
  mean_std(e2, &stats.mean_e2, &stats.std2);
  return stats;
}

double average_precision(const std::vector<double>& scores,
                         const std::vector<int>& labels) {
  if (scores.size() != labels.size() || scores.empty()) {
    throw std::invalid_argument("average_precision: bad input sizes");
  }
  const int positives =
      static_cast<int>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) {
    throw std::invalid_argument("average_precision: no positive labels");
  }

  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });

  // Precision/recall at every rank, then the monotone precision envelope.
  std::vector<double> precision, recall;
  int tp = 0;
  for (size_t rank = 0; rank < order.size(); ++rank) {
    if (labels[order[rank]] == 1) ++tp;
    precision.push_back(static_cast<double>(tp) /
                        static_cast<double>(rank + 1));
    recall.push_back(static_cast<double>(tp) / positives);
  }
  for (int i = static_cast<int>(precision.size()) - 2; i >= 0; --i) {
    precision[i] = std::max(precision[i], precision[i + 1]);
  }

  double ap = 0.0;
  double prev_recall = 0.0;
  for (size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

}  // namespace egodoa
