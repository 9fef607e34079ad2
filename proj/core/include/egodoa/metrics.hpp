#ifndef EGODOA_METRICS_HPP_
#define EGODOA_METRICS_HPP_

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "egodoa/geometry.hpp"

namespace egodoa {

struct SubsetMetrics {
  double accuracy_pct = 0.0;
  double mean_ae_deg = 0.0;
  int count = 0;
};

struct EvalReport {
  SubsetMetrics overall;
  SubsetMetrics in_fov;
  SubsetMetrics out_of_fov;
};

// Percentage of pairs with cyclic AE strictly below the threshold.
// Throws std::invalid_argument on empty or mismatched inputs.
double accuracy_at(const std::vector<double>& preds_deg,
                   const std::vector<double>& gts_deg, double threshold_deg);

double mean_abs_error(const std::vector<double>& preds_deg,
                      const std::vector<double>& gts_deg);

struct HistogramBin {
  double mean_ae_deg = 0.0;
  int count = 0;  // 0 marks an empty (unpopulated) bin
};

// Per ground-truth-degree mean AE over 360 integer bins.
std::vector<HistogramBin> error_histogram(const std::vector<double>& preds_deg,
                                          const std::vector<double>& gts_deg);

struct Detection {
  SpherePoint point;
  double score = 0.0;
  int row = 0;  // elevation cell
  int col = 0;  // azimuth cell
};

// Greedy NMS on a 90x180 score grid (2-degree cells). Radius is Euclidean
// in grid cells; the azimuth axis wraps, elevation does not.
std::vector<Detection> nms_sphere(const Eigen::MatrixXd& map, double radius,
                                  double threshold);

// Converts a grid cell to sphere coordinates (cell centers).
SpherePoint cell_to_sphere(int row, int col);

struct Assignment {
  std::vector<std::pair<int, int>> matches;  // (row index, col index)
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;
  double total_cost = 0.0;
};

// Minimum-total-cost one-to-one assignment; rectangular matrices are
// padded internally.
Assignment hungarian_match(const Eigen::MatrixXd& cost);

struct E1E2Stats {
  double mean_e1 = 0.0;
  double std1 = 0.0;
  double mean_e2 = 0.0;
  double std2 = 0.0;
  int matched = 0;
};

// Great-circle E1/E2 statistics after Hungarian matching. Unmatched
// predictions/ground truths contribute the maximal distance (180 deg).
E1E2Stats mean_e1_e2(const std::vector<Detection>& preds,
                     const std::vector<SpherePoint>& gts);

// Area under the precision-recall curve, all-points interpolation.
// Throws std::invalid_argument when there is no positive label.
double average_precision(const std::vector<double>& scores,
                         const std::vector<int>& labels);

}  // namespace egodoa

#endif  // EGODOA_METRICS_HPP_
