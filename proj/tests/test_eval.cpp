#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <numeric>
#include <random>

#include "egodoa/metrics.hpp"

using namespace egodoa;

namespace {

// Independent greedy reference for nms_sphere: keep the global max above
// the threshold, then drop every cell within `radius` (grid-cell distance
// with azimuth wrap) of any kept detection, and repeat.
std::vector<std::pair<int, int>> nms_reference(const Eigen::MatrixXd& map,
                                               double radius,
                                               double threshold) {
  const int rows = static_cast<int>(map.rows());
  const int cols = static_cast<int>(map.cols());
  std::vector<std::pair<int, int>> kept;
  auto suppressed_by_kept = [&](int r, int c) {
    for (const auto& [kr, kc] : kept) {
      const int dr = std::abs(r - kr);
      int dc = std::abs(c - kc);
      dc = std::min(dc, cols - dc);
      if (std::sqrt(double(dr * dr + dc * dc)) <= radius) return true;
    }
    return false;
  };
  for (;;) {
    double best = threshold;
    int br = -1, bc = -1;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        if (map(r, c) > best && !suppressed_by_kept(r, c)) {
          best = map(r, c);
          br = r;
          bc = c;
        }
      }
    }
    if (br < 0) return kept;
    kept.emplace_back(br, bc);
  }
}

// Exhaustive minimum assignment over all n! permutations (square matrix).
double brute_force_assignment(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, perm[i]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Detection det(double az, double el, double score = 1.0) {
  Detection d;
  d.point = SpherePoint{az, el};
  d.score = score;
  return d;
}

}  // namespace

TEST_CASE("accuracy_at uses a strict threshold") {
  // AE exactly at the threshold counts as incorrect.
  CHECK(accuracy_at({92.0}, {90.0}, 2.0) == 0.0);
  CHECK(accuracy_at({91.0, 93.0}, {90.0, 90.0}, 2.0) == doctest::Approx(50.0));
  CHECK(accuracy_at({10.0, 350.0}, {10.0, 350.0}, 2.0) ==
        doctest::Approx(100.0));
  // Wrap-around: 359 vs 1 is an AE of 2, still incorrect.
  CHECK(accuracy_at({359.0}, {1.0}, 2.0) == 0.0);
  CHECK(accuracy_at({359.5}, {1.0}, 2.0) == doctest::Approx(100.0));
  CHECK_THROWS_AS(accuracy_at({}, {}, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(accuracy_at({1.0}, {1.0, 2.0}, 2.0), std::invalid_argument);
}

TEST_CASE("mean_abs_error fixtures") {
  CHECK(mean_abs_error({90.0, 100.0}, {90.0, 90.0}) == doctest::Approx(5.0));
  CHECK(mean_abs_error({350.0}, {10.0}) == doctest::Approx(20.0));
  CHECK_THROWS_AS(mean_abs_error({}, {}), std::invalid_argument);
}

TEST_CASE("error_histogram: perfect predictions and empty bins") {
  std::vector<double> gts(100, 42.0), preds(100, 42.0);
  const auto hist = error_histogram(preds, gts);
  REQUIRE(hist.size() == 360);
  CHECK(hist[42].count == 100);
  CHECK(hist[42].mean_ae_deg == 0.0);
  for (int i = 0; i < 360; ++i) {
    if (i != 42) CHECK(hist[i].count == 0);
  }
}

TEST_CASE("error_histogram: uniform random predictions average near 90") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(0.0, 360.0);
  std::vector<double> preds(10000), gts(10000, 135.0);
  for (double& p : preds) p = dist(rng);
  const auto hist = error_histogram(preds, gts);
  CHECK(hist[135].count == 10000);
  CHECK(hist[135].mean_ae_deg == doctest::Approx(90.0).epsilon(0.06));
}

TEST_CASE("nms_sphere: single and nearby peaks") {
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(90, 180);
  map(45, 90) = 1.0;
  auto dets = nms_sphere(map, 5.0, 0.5);
  REQUIRE(dets.size() == 1);
  CHECK(dets[0].row == 45);
  CHECK(dets[0].col == 90);
  CHECK(dets[0].score == 1.0);
  CHECK(dets[0].point.azimuth_deg == doctest::Approx(181.0));
  CHECK(dets[0].point.elevation_deg == doctest::Approx(1.0));

  // A second peak 3 cells away is suppressed at radius 5...
  map(45, 93) = 0.8;
  CHECK(nms_sphere(map, 5.0, 0.5).size() == 1);
  // ...but survives at radius 2.
  CHECK(nms_sphere(map, 2.0, 0.5).size() == 2);
  // Below-threshold peaks never appear.
  CHECK(nms_sphere(map, 2.0, 0.9).size() == 1);
}

TEST_CASE("nms_sphere: suppression wraps across the azimuth seam") {
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(90, 180);
  map(10, 0) = 1.0;
  map(10, 178) = 0.9;  // 2 cells away through the wrap
  CHECK(nms_sphere(map, 3.0, 0.5).size() == 1);
  CHECK(nms_sphere(map, 1.5, 0.5).size() == 2);
}

TEST_CASE("nms_sphere matches the brute-force reference on random grids") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd map(20, 20);
    for (int r = 0; r < 20; ++r) {
      for (int c = 0; c < 20; ++c) map(r, c) = dist(rng);
    }
    const double radius = 1.0 + 3.0 * dist(rng);
    const double threshold = 0.3 + 0.4 * dist(rng);
    const auto fast = nms_sphere(map, radius, threshold);
    const auto ref = nms_reference(map, radius, threshold);
    REQUIRE(fast.size() == ref.size());
    for (size_t i = 0; i < ref.size(); ++i) {
      CHECK(fast[i].row == ref[i].first);
      CHECK(fast[i].col == ref[i].second);
      CHECK(fast[i].score == map(ref[i].first, ref[i].second));
      // Scores are emitted in non-increasing order.
      if (i > 0) CHECK(fast[i].score <= fast[i - 1].score);
    }
  }
}

TEST_CASE("cell_to_sphere covers the grid with 2-degree cell centers") {
  CHECK(cell_to_sphere(0, 0).azimuth_deg == doctest::Approx(1.0));
  CHECK(cell_to_sphere(0, 0).elevation_deg == doctest::Approx(-89.0));
  CHECK(cell_to_sphere(89, 179).azimuth_deg == doctest::Approx(359.0));
  CHECK(cell_to_sphere(89, 179).elevation_deg == doctest::Approx(89.0));
}

TEST_CASE("hungarian_match: small fixtures") {
  Eigen::MatrixXd one(1, 1);
  one << 3.5;
  const auto a = hungarian_match(one);
  REQUIRE(a.matches.size() == 1);
  CHECK(a.total_cost == doctest::Approx(3.5));

  Eigen::MatrixXd two(2, 2);
  two << 1.0, 10.0, 10.0, 1.0;
  const auto b = hungarian_match(two);
  CHECK(b.total_cost == doctest::Approx(2.0));
  for (const auto& [i, j] : b.matches) CHECK(i == j);

  // Rectangular: the extra row goes unmatched.
  Eigen::MatrixXd rect(3, 2);
  rect << 1.0, 9.0, 9.0, 1.0, 5.0, 5.0;
  const auto c = hungarian_match(rect);
  CHECK(c.matches.size() == 2);
  CHECK(c.unmatched_rows.size() == 1);
  CHECK(c.unmatched_rows[0] == 2);
  CHECK(c.total_cost == doctest::Approx(2.0));

  Eigen::MatrixXd bad(1, 1);
  bad << std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(hungarian_match(bad), std::invalid_argument);
}

TEST_CASE("hungarian_match equals exhaustive search on 200 random 5x5") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd cost(5, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) cost(i, j) = dist(rng);
    }
    const auto result = hungarian_match(cost);
    REQUIRE(result.matches.size() == 5);
    // The matching is a permutation.
    std::vector<bool> row_used(5, false), col_used(5, false);
    double total = 0.0;
    for (const auto& [i, j] : result.matches) {
      CHECK_FALSE(row_used[i]);
      CHECK_FALSE(col_used[j]);
      row_used[i] = col_used[j] = true;
      total += cost(i, j);
    }
    CHECK(result.total_cost == doctest::Approx(total).epsilon(1e-12));
    CHECK(result.total_cost ==
          doctest::Approx(brute_force_assignment(cost)).epsilon(1e-9));
  }
}

TEST_CASE("mean_e1_e2 fixtures") {
  // Exact matches: both errors zero.
  {
    const auto s = mean_e1_e2({det(30.0, 10.0), det(200.0, -5.0)},
                              {{30.0, 10.0}, {200.0, -5.0}});
    CHECK(s.matched == 2);
    CHECK(s.mean_e1 == doctest::Approx(0.0));
    CHECK(s.mean_e2 == doctest::Approx(0.0));
  }
  // One ground truth, no predictions: E2 saturates at 180.
  {
    const auto s = mean_e1_e2({}, {{90.0, 0.0}});
    CHECK(s.matched == 0);
    CHECK(s.mean_e2 == doctest::Approx(180.0));
  }
  // 90 degrees apart on the equator.
  {
    const auto s = mean_e1_e2({det(0.0, 0.0)}, {{90.0, 0.0}});
    CHECK(s.matched == 1);
    CHECK(s.mean_e1 == doctest::Approx(90.0));
    CHECK(s.mean_e2 == doctest::Approx(90.0));
  }
  // Swapping predictions and ground truths swaps E1 and E2.
  {
    std::vector<Detection> preds = {det(10.0, 5.0), det(100.0, -20.0)};
    std::vector<SpherePoint> gts = {{15.0, 0.0}, {110.0, -25.0}, {300.0, 40.0}};
    std::vector<Detection> preds_swapped;
    std::vector<SpherePoint> gts_swapped;
    for (const auto& g : gts) preds_swapped.push_back(det(g.azimuth_deg, g.elevation_deg));
    for (const auto& p : preds) gts_swapped.push_back(p.point);
    const auto a = mean_e1_e2(preds, gts);
    const auto b = mean_e1_e2(preds_swapped, gts_swapped);
    CHECK(a.mean_e1 == doctest::Approx(b.mean_e2).epsilon(1e-12));
    CHECK(a.mean_e2 == doctest::Approx(b.mean_e1).epsilon(1e-12));
    CHECK(a.matched == b.matched);
  }
}

TEST_CASE("average_precision fixtures") {
  // All positives ranked first.
  CHECK(average_precision({0.9, 0.8, 0.7, 0.2, 0.1}, {1, 1, 1, 0, 0}) ==
        doctest::Approx(1.0));
  // One positive of ten, ranked last.
  {
    std::vector<double> scores;
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {
      scores.push_back(1.0 - 0.05 * i);
      labels.push_back(i == 9 ? 1 : 0);
    }
    CHECK(average_precision(scores, labels) == doctest::Approx(0.1));
  }
  // Interleaved: precision 1/1 at the first hit, 2/3 at the second.
  CHECK(average_precision({0.9, 0.8, 0.7}, {1, 0, 1}) ==
        doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
  CHECK_THROWS_AS(average_precision({0.5}, {0}), std::invalid_argument);
  CHECK_THROWS_AS(average_precision({0.5}, {0, 1}), std::invalid_argument);
}
