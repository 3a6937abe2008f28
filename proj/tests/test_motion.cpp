#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "bogwatch/camera.hpp"
#include "bogwatch/error.hpp"
#include "bogwatch/motion.hpp"
#include "support.hpp"

using namespace bogwatch;
using namespace bogwatch::motion;

namespace {

struct MeanFlow {
  Vec2 mean;
  std::size_t valid = 0;
};

MeanFlow mean_valid(const FlowField& f, int margin) {
  MeanFlow m;
  double su = 0.0, sv = 0.0;
  for (int y = margin; y < f.height() - margin; ++y) {
    for (int x = margin; x < f.width() - margin; ++x) {
      if (!f.valid(x, y)) continue;
      su += f.u(x, y);
      sv += f.v(x, y);
      ++m.valid;
    }
  }
  if (m.valid) m.mean = {su / m.valid, sv / m.valid};
  return m;
}

FlowField uniform(int w, int h, Vec2 d) {
  FlowField f(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f.set(x, y, d, true);
  }
  return f;
}

}  // namespace

TEST_CASE("identical frames give zero flow") {
  const testing::WaveTexture tex(21);
  const auto img = tex.render(96, 96);
  const auto f = lucas_kanade_flow(img, img);
  const auto m = mean_valid(f, 0);
  CHECK(m.valid > 0.9 * 96 * 96);
  for (int y = 0; y < 96; ++y) {
    for (int x = 0; x < 96; ++x) {
      if (!f.valid(x, y)) continue;
      CHECK(std::abs(f.u(x, y)) < 1e-9);
      CHECK(std::abs(f.v(x, y)) < 1e-9);
    }
  }
}

TEST_CASE("translation by (2, 1) is recovered") {
  const testing::WaveTexture tex(7);
  const auto prev = tex.render(128, 128);
  const auto next = tex.render(128, 128, 2.0, 1.0);
  const auto f = lucas_kanade_flow(prev, next);
  const auto m = mean_valid(f, 16);
  REQUIRE(m.valid > 0);
  CHECK(std::abs(m.mean.x - 2.0) < 0.25);
  CHECK(std::abs(m.mean.y - 1.0) < 0.25);

  // Photometric check: pulling next back along the flow reproduces prev.
  const auto back = imaging::warp(next, f);
  double err = 0.0;
  std::size_t n = 0;
  for (int y = 16; y < 112; ++y) {
    for (int x = 16; x < 112; ++x) {
      if (!f.valid(x, y)) continue;
      err += std::abs(double(back.at(x, y)) - prev.at(x, y));
      ++n;
    }
  }
  CHECK(err / n < 0.02);
}

TEST_CASE("textureless frames are fully invalid") {
  const Raster flat(64, 64, 1, 0.6f);
  CHECK(lucas_kanade_flow(flat, flat).valid_count() == 0);
  CHECK_THROWS_AS(lucas_kanade_flow(flat, Raster(63, 64, 1)), ShapeError);
  LkParams bad;
  bad.window = 4;
  CHECK_THROWS(lucas_kanade_flow(flat, flat, bad));
}

TEST_CASE("unrelated frames fail the residual gate") {
  const testing::WaveTexture a(1), b(2);
  const auto f = lucas_kanade_flow(a.render(96, 96), b.render(96, 96));
  CHECK(f.valid_count() < 96 * 96 / 20);
  LkParams off;
  off.max_residual = 0.0;
  CHECK(lucas_kanade_flow(a.render(96, 96), b.render(96, 96), off).valid_count() > 96 * 96 / 2);
}

TEST_CASE("consistency check examples") {
  auto fwd = uniform(20, 10, {2.0, 0.0});
  fwd.invalidate(3, 3);
  const auto bwd = uniform(20, 10, {-2.0, 0.0});
  const auto same = consistency_check(fwd, bwd, 1.0);
  for (int y = 0; y < 10; ++y) {
    for (int x = 0; x < 20; ++x) CHECK(same.valid(x, y) == fwd.valid(x, y));
  }
  CHECK(consistency_check(fwd, FlowField(20, 10), 0.5).valid_count() == 0);
  const auto inf = consistency_check(fwd, FlowField(20, 10), std::numeric_limits<double>::infinity());
  CHECK(inf.valid_count() == fwd.valid_count());
}

TEST_CASE("mask flow examples") {
  const auto f = uniform(4, 4, {4.0, -2.0});
  const auto one = mask_flow(f, Raster(4, 4, 1, 1.0f));
  CHECK(one.at(2, 2).x == 4.0);
  const auto zero = mask_flow(f, Raster(4, 4, 1, 0.0f));
  CHECK(zero.at(1, 1).x == 0.0);
  CHECK(zero.valid(1, 1));
  const auto q = mask_flow(f, Raster(4, 4, 1, 0.25f));
  CHECK(q.at(0, 0).x == doctest::Approx(1.0));
  CHECK(q.at(0, 0).y == doctest::Approx(-0.5));
}

TEST_CASE("glare disc exclusion") {
  const auto f = uniform(21, 21, {1.0, 0.0});
  CHECK(exclude_disc(f, {10, 10}, 0.0).valid_count() == f.valid_count());
  const auto g = exclude_disc(f, {10, 10}, 2.0);
  CHECK_FALSE(g.valid(10, 12));
  CHECK(g.valid(10, 13));
  CHECK(g.valid_count() == f.valid_count() - 13);
}

TEST_CASE("global motion examples") {
  const auto w = MotionWeights::for_width(32);
  CHECK(w.sigma_d == 16.0);

  const auto f = uniform(32, 32, {1.0, 0.0});
  const auto gm = global_motion(f, Raster(32, 32, 1, 1.0f), {16, 16}, w);
  CHECK(gm.v.x == doctest::Approx(1.0));
  CHECK(gm.v.y == doctest::Approx(0.0));
  CHECK(gm.confidence > 0.0);
  CHECK(gm.confidence <= 1.0);

  const auto none = global_motion(f, Raster(32, 32, 1, 0.0f), {16, 16}, w);
  CHECK(none.v.x == 0.0);
  CHECK(none.v.y == 0.0);
  CHECK(none.confidence == 0.0);

  // A sits left of the sun moving straight at it; B sits right of it
  // moving perpendicular to its sun direction.
  FlowField two(32, 32);
  two.set(5, 10, {2.0, 0.0}, true);
  two.set(15, 10, {0.0, 2.0}, true);
  const auto gm2 = global_motion(two, Raster(32, 32, 1, 1.0f), {10, 10}, w);
  CHECK(gm2.v.x == doctest::Approx(2.0));
  CHECK(gm2.v.y == doctest::Approx(0.0));
  CHECK(gm2.confidence == doctest::Approx(0.5));
}

TEST_CASE("global motion symmetries") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0), p(0.0, 1.0);
  const int w = 40, h = 30;
  for (int trial = 0; trial < 20; ++trial) {
    FlowField f(w, h), flipped(w, h);
    Raster prob(w, h, 1), prob_flipped(w, h, 1), prob_scaled(w, h, 1);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const Vec2 d{u(rng), u(rng)};
        const bool ok = p(rng) > 0.2;
        const float m = static_cast<float>(p(rng));
        f.set(x, y, d, ok);
        flipped.set(w - 1 - x, y, {-d.x, d.y}, ok);
        prob.set(x, y, m);
        prob_flipped.set(w - 1 - x, y, m);
        prob_scaled.set(x, y, 0.5f * m);
      }
    }
    const Pixel sun{p(rng) * (w - 1), p(rng) * (h - 1)};
    const auto mw = MotionWeights::for_width(w);
    const auto a = global_motion(f, prob, sun, mw);
    const auto b = global_motion(flipped, prob_flipped, {w - 1 - sun.x, sun.y}, mw);
    CHECK(b.v.x == doctest::Approx(-a.v.x).epsilon(1e-12));
    CHECK(b.v.y == doctest::Approx(a.v.y).epsilon(1e-12));
    const auto c = global_motion(f, prob_scaled, sun, mw);
    CHECK(c.v.x == doctest::Approx(a.v.x).epsilon(1e-6));
    CHECK(c.v.y == doctest::Approx(a.v.y).epsilon(1e-6));
  }
}

TEST_CASE("flow file round trip") {
  const auto dir = testing::scratch_dir("flow");
  FlowField f(5, 4);
  f.set(0, 0, {1.5, -0.25}, true);
  f.set(4, 3, {-12.0 / 64.0, 300.0}, true);
  f.set(2, 1, {7.0, 7.0}, false);
  write_flow(dir / "f.png", dir / "v.png", f);
  const auto g = read_flow(dir / "f.png", dir / "v.png");
  CHECK(g.u(0, 0) == 1.5);
  CHECK(g.v(0, 0) == -0.25);
  CHECK(g.u(4, 3) == doctest::Approx(-12.0 / 64.0));
  CHECK(g.v(4, 3) == 300.0);
  CHECK_FALSE(g.valid(2, 1));
  CHECK(g.valid_count() == 2);
}
