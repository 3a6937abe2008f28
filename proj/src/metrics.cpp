#include "bogwatch/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "bogwatch/error.hpp"

namespace bogwatch::metrics {

namespace {

void require_pair(std::span<const double> truth, std::span<const double> pred, const char* what) {
  if (truth.size() != pred.size()) throw ShapeError(std::string(what) + ": series lengths differ");
  if (truth.empty()) throw ShapeError(std::string(what) + ": empty series");
}

}  // namespace

std::vector<double> normalize_minmax(std::span<const double> s) {
  if (s.empty()) throw ShapeError("normalize_minmax: empty series");
  const auto [lo, hi] = std::minmax_element(s.begin(), s.end());
  const double range = *hi - *lo;
  std::vector<double> out(s.size(), 0.0);
  if (range <= 0.0) return out;
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = (s[i] - *lo) / range;
  return out;
}

double mape(std::span<const double> truth, std::span<const double> pred, MapeMode mode) {
  require_pair(truth, pred, "mape");
  if (mode == MapeMode::normalized) {
    const auto t = normalize_minmax(truth);
    const auto p = normalize_minmax(pred);
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      sum += std::abs((t[i] - p[i]) / std::max(std::abs(t[i]), kNormalizedMapeGuard));
    }
    return 100.0 * sum / static_cast<double>(t.size());
  }
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 0.0) zeros.push_back(i);
  }
  if (!zeros.empty()) throw DivisionGuardError(std::move(zeros));
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) sum += std::abs((truth[i] - pred[i]) / truth[i]);
  return 100.0 * sum / static_cast<double>(truth.size());
}

double r_squared(std::span<const double> truth, std::span<const double> pred, R2Mode mode) {
  require_pair(truth, pred, "r_squared");
  if (truth.size() < 2) throw UndefinedVarianceError("r_squared needs at least two points");
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (truth[i] - pred[i]) * (truth[i] - pred[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (ss_tot == 0.0) throw UndefinedVarianceError("r_squared: ground truth is constant");
  if (mode == R2Mode::norm_ratio) return 1.0 - std::sqrt(ss_res) / std::sqrt(ss_tot);
  return 1.0 - ss_res / ss_tot;
}

double mean_absolute_error(std::span<const double> truth, std::span<const double> pred) {
  require_pair(truth, pred, "mean_absolute_error");
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) sum += std::abs(truth[i] - pred[i]);
  return sum / static_cast<double>(truth.size());
}

double frechet(std::span<const Point2> a, std::span<const Point2> b) {
  if (a.empty() || b.empty()) throw ShapeError("frechet: curves must be non-empty");
  const std::size_t m = b.size();
  auto dist = [&](std::size_t i, std::size_t j) { return std::hypot(a[i].x - b[j].x, a[i].y - b[j].y); };
  // Rolling rows of the coupling table.
  std::vector<double> prev(m), cur(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = dist(i, j);
      if (i == 0 && j == 0) {
        cur[j] = d;
      } else if (i == 0) {
        cur[j] = std::max(cur[j - 1], d);
      } else if (j == 0) {
        cur[j] = std::max(prev[j], d);
      } else {
        cur[j] = std::max(std::min({prev[j], prev[j - 1], cur[j - 1]}), d);
      }
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

std::vector<Point2> series_curve(std::span<const double> values) {
  std::vector<Point2> out(values.size());
  const double denom = values.size() > 1 ? static_cast<double>(values.size() - 1) : 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = {static_cast<double>(i) / denom, values[i]};
  return out;
}

double mean_iou(const imaging::Raster& pred, const imaging::Raster& truth) {
  if (!pred.same_size(truth)) throw ShapeError("mean_iou: mask dimensions differ");
  std::size_t inter[2] = {0, 0};
  std::size_t uni[2] = {0, 0};
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      const bool p = pred.at(x, y) >= 0.5f;
      const bool t = truth.at(x, y) >= 0.5f;
      // class 1 = foreground, class 0 = background
      for (int c = 0; c < 2; ++c) {
        const bool pc = (c == 1) == p;
        const bool tc = (c == 1) == t;
        inter[c] += (pc && tc) ? 1 : 0;
        uni[c] += (pc || tc) ? 1 : 0;
      }
    }
  }
  double sum = 0.0;
  for (int c = 0; c < 2; ++c) {
    sum += uni[c] == 0 ? 1.0 : static_cast<double>(inter[c]) / static_cast<double>(uni[c]);
  }
  return 0.5 * sum;
}

}  // namespace bogwatch::metrics
