#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "bogwatch/error.hpp"
#include "bogwatch/metrics.hpp"

using namespace bogwatch;
using namespace bogwatch::metrics;
using V = std::vector<double>;
using C = std::vector<Point2>;

TEST_CASE("min-max normalisation") {
  CHECK(normalize_minmax(V{2, 4, 6}) == V{0, 0.5, 1});
  CHECK(normalize_minmax(V{5, 5}) == V{0, 0});
  CHECK(normalize_minmax(V{0, 1}) == V{0, 1});
}

TEST_CASE("mape examples") {
  CHECK(mape(V{3, 4}, V{3, 4}) == 0.0);
  CHECK(mape(V{2, 4, 5}, V{2, 5, 4}) == doctest::Approx(15.0).epsilon(1e-12));
  CHECK(mape(V{1}, V{2}) == 100.0);
  try {
    mape(V{0, 1, 0}, V{1, 1, 1});
    FAIL("expected a division guard error");
  } catch (const DivisionGuardError& e) {
    CHECK(e.indices() == std::vector<std::size_t>{0, 2});
  }
  CHECK_THROWS_AS(mape(V{1, 2}, V{1}), ShapeError);
  // Normalised mode divides by max(|truth|, 1e-6) after min-max scaling.
  const double n = mape(V{1, 2, 3}, V{1, 2, 3.5}, MapeMode::normalized);
  CHECK(n == doctest::Approx(100.0 * (0.0 + std::abs(0.5 - 0.4) / 0.5 + 0.0) / 3.0));
}

TEST_CASE("r squared examples") {
  CHECK(r_squared(V{1, 2, 3}, V{1, 2, 3}) == 1.0);
  CHECK(r_squared(V{1, 2, 3}, V{2, 2, 2}) == 0.0);
  CHECK(r_squared(V{1, 2, 3}, V{1.1, 2.0, 2.9}) == doctest::Approx(0.99).epsilon(1e-12));
  CHECK(r_squared(V{1, 2, 3}, V{1.1, 2.0, 2.9}, R2Mode::norm_ratio) ==
        doctest::Approx(1.0 - std::sqrt(0.02) / std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(r_squared(V{4, 4, 4}, V{1, 2, 3}), UndefinedVarianceError);
  CHECK_THROWS_AS(r_squared(V{4}, V{4}), UndefinedVarianceError);
}

TEST_CASE("mean absolute error") {
  CHECK(mean_absolute_error(V{1, 2, 3}, V{2, 2, 1}) == 1.0);
}

TEST_CASE("frechet examples") {
  const C a{{0, 0}, {1, 2}, {3, 1}};
  CHECK(frechet(a, a) == 0.0);
  CHECK(frechet(C{{0, 0}, {1, 0}}, C{{0, 1}, {1, 1}}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(frechet(C{{0, 0}}, C{{3, 4}}) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(frechet(C{{0, 0}, {2, 0}, {4, 0}}, C{{0, 1}, {4, 1}}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK_THROWS(frechet(C{}, a));
}

TEST_CASE("frechet properties") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int trial = 0; trial < 300; ++trial) {
    C a(1 + rng() % 7), b(1 + rng() % 7);
    for (auto& p : a) p = {u(rng), u(rng)};
    for (auto& p : b) p = {u(rng), u(rng)};
    const double ab = frechet(a, b);
    CHECK(ab == frechet(b, a));
    CHECK(ab >= 0.0);
    // Directed Hausdorff distances in both directions bound it from below.
    double h = 0.0;
    for (const auto* pair : {&a, &b}) {
      const auto& from = *pair;
      const auto& to = pair == &a ? b : a;
      for (const auto& p : from) {
        double best = INFINITY;
        for (const auto& q : to) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
        h = std::max(h, best);
      }
    }
    CHECK(ab >= h - 1e-12);
  }
}

TEST_CASE("series curves") {
  const auto c = series_curve(V{5, 6, 7});
  REQUIRE(c.size() == 3);
  CHECK(c[1].x == 0.5);
  CHECK(c[2].y == 7.0);
  CHECK(series_curve(V{9})[0].x == 0.0);
}

TEST_CASE("mean iou examples") {
  const auto truth = imaging::Raster::from_data(4, 1, 1, {1, 1, 0, 0});
  const auto pred = imaging::Raster::from_data(4, 1, 1, {0, 1, 1, 0});
  CHECK(mean_iou(truth, truth) == 1.0);
  CHECK(mean_iou(pred, truth) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(mean_iou(pred, truth) == mean_iou(truth, pred));
  const imaging::Raster empty(3, 3, 1);
  CHECK(mean_iou(empty, empty) == 1.0);
  CHECK_THROWS_AS(mean_iou(empty, truth), ShapeError);
}
