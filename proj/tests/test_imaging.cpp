#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "bogwatch/camera.hpp"
#include "bogwatch/error.hpp"
#include "bogwatch/image_io.hpp"
#include "support.hpp"

using namespace bogwatch;
using namespace bogwatch::imaging;

TEST_CASE("raster stores clamped unit-interval values") {
  Raster r(3, 2, 3, 0.25f);
  CHECK(r.data().size() == 18);
  r.set(1, 1, 2, 1.7f);
  CHECK(r.at(1, 1, 2) == 1.0f);
  r.set(0, 0, 0, -0.3f);
  CHECK(r.at(0, 0, 0) == 0.0f);
  r.set(0, 0, 1, std::nanf(""));
  CHECK(r.at(0, 0, 1) == 0.0f);
  CHECK_THROWS_AS(Raster::from_data(2, 2, 1, {0.f, 0.f, 0.f}), ShapeError);
  CHECK_THROWS_AS(Raster::from_data(1, 1, 1, {1.5f}), RangeError);
}

TEST_CASE("invalid flow pixels carry zero displacement") {
  FlowField f(4, 4);
  f.set(1, 2, {3.0, -1.0}, false);
  CHECK(f.at(1, 2).x == 0.0);
  CHECK(f.at(1, 2).y == 0.0);
  f.set(1, 2, {3.0, -1.0}, true);
  CHECK(f.valid(1, 2));
  f.invalidate(1, 2);
  CHECK_FALSE(f.valid(1, 2));
  CHECK(f.at(1, 2).x == 0.0);
}

TEST_CASE("principal point looks at the zenith") {
  const auto cam = FisheyeCamera::equidistant(401, 401, 200.0, 1.5);
  const auto d = cam.pixel_to_ray(cam.principal_point());
  CHECK(d.east == doctest::Approx(0.0));
  CHECK(d.north == doctest::Approx(0.0));
  CHECK(d.up == doctest::Approx(1.0));
  const auto p = cam.ray_to_pixel({0.0, 0.0, 1.0});
  REQUIRE(p);
  CHECK(p->x == doctest::Approx(200.0));
  CHECK(p->y == doctest::Approx(200.0));
}

TEST_CASE("equidistant lens closed forms") {
  const auto cam = FisheyeCamera::equidistant(401, 401, 200.0, 1.5);
  const auto c = cam.principal_point();

  // 100 px right of centre: zenith angle 0.5 rad towards east.
  const auto d = cam.pixel_to_ray({c.x + 100.0, c.y});
  CHECK(std::acos(d.up) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(d.east > 0.0);
  CHECK(std::abs(d.north) < 1e-12);

  // Zenith 0.25 rad due north: 50 px above centre.
  const Direction north{0.0, std::sin(0.25), std::cos(0.25)};
  const auto p = cam.ray_to_pixel(north);
  REQUIRE(p);
  CHECK(p->x == doctest::Approx(c.x).epsilon(1e-12));
  CHECK(p->y == doctest::Approx(c.y - 50.0).epsilon(1e-12));
}

TEST_CASE("rays beyond the lens field and bad inputs") {
  const auto cam = FisheyeCamera::equidistant(401, 401, 200.0, 0.9);
  CHECK_FALSE(cam.ray_to_pixel(direction_from_angles(0.0, 0.0)).has_value());
  CHECK_THROWS_AS(cam.ray_to_pixel({0.0, 0.0, 1.1}), InvalidDirectionError);
  CHECK_THROWS_AS(cam.pixel_to_ray({-1.0, 10.0}), OutOfFieldError);
  CHECK_THROWS_AS(cam.pixel_to_ray({0.0, 0.0}), OutOfFieldError);  // corner lies beyond theta_max
}

TEST_CASE("projection round trip on a general lens") {
  FisheyeParams p;
  p.image_width = 640;
  p.image_height = 480;
  p.cx = 321.3;
  p.cy = 238.9;
  p.poly_coeffs = {0.0, 180.0, 4.0, -6.5};
  p.theta_max_rad = 1.4;
  p.affine_c = 1.01;
  p.affine_d = 0.004;
  p.affine_e = -0.003;
  p.north_offset_deg = 27.0;
  const auto cam = FisheyeCamera::create(p);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(0.0, 639.0), uy(0.0, 479.0);
  int tested = 0;
  while (tested < 100) {
    const Pixel q{ux(rng), uy(rng)};
    if (!cam.in_field(q)) continue;
    const auto d = cam.pixel_to_ray(q);
    CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.up >= std::cos(p.theta_max_rad) - 1e-12);
    const auto back = cam.ray_to_pixel(d);
    REQUIRE(back);
    CHECK(std::abs(back->x - q.x) < 1e-6);
    CHECK(std::abs(back->y - q.y) < 1e-6);
    ++tested;
  }
}

TEST_CASE("north offset rotates azimuth in the image") {
  auto cam0 = FisheyeCamera::equidistant(201, 201, 60.0, 1.5);
  auto params = cam0.params();
  params.north_offset_deg = 90.0;  // east appears at image up
  const auto cam90 = FisheyeCamera::create(params);
  const auto east = direction_from_angles(90.0, 45.0);
  const auto p = cam90.ray_to_pixel(east);
  REQUIRE(p);
  CHECK(p->x == doctest::Approx(100.0));
  CHECK(p->y < 100.0);
}

TEST_CASE("camera parameter validation") {
  FisheyeParams p;
  p.image_width = 100;
  p.image_height = 100;
  p.cx = 50;
  p.cy = 50;
  p.poly_coeffs = {0.0, 50.0};
  p.theta_max_rad = 1.5;
  CHECK_NOTHROW(FisheyeCamera::create(p));
  auto bad = p;
  bad.poly_coeffs = {0.0, 50.0, -40.0};  // turns over before theta_max
  CHECK_THROWS_AS(FisheyeCamera::create(bad), ModelError);
  bad = p;
  bad.cx = 140;
  CHECK_THROWS_AS(FisheyeCamera::create(bad), ModelError);
  bad = p;
  bad.poly_coeffs = {1.0, 50.0};
  CHECK_THROWS_AS(FisheyeCamera::create(bad), ModelError);
}

TEST_CASE("camera file round trip") {
  const auto dir = testing::scratch_dir("camera");
  FisheyeParams p;
  p.image_width = 320;
  p.image_height = 240;
  p.cx = 160.5;
  p.cy = 119.25;
  p.poly_coeffs = {0.0, 100.0, 1.5};
  p.theta_max_rad = 1.3;
  p.affine_d = 0.01;
  p.north_offset_deg = -12.0;
  FisheyeCamera::create(p).save(dir / "cam.json");
  const auto q = FisheyeCamera::load(dir / "cam.json").params();
  CHECK(q.image_width == 320);
  CHECK(q.cy == 119.25);
  CHECK(q.poly_coeffs == p.poly_coeffs);
  CHECK(q.affine_d == 0.01);
  CHECK(q.north_offset_deg == -12.0);
  CHECK_THROWS_AS(FisheyeCamera::load(dir / "missing.json"), MissingInputError);
}

TEST_CASE("warp examples") {
  Raster ramp(10, 4, 1);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 10; ++x) ramp.set(x, y, x / 10.0f);
  }
  FlowField zero(10, 4);
  CHECK(warp(ramp, zero) == ramp);

  FlowField shift(10, 4);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 10; ++x) shift.set(x, y, {-3.0, 0.0}, true);
  }
  const auto out = warp(ramp, shift);
  for (int y = 0; y < 4; ++y) {
    for (int x = 0; x < 10; ++x) CHECK(out.at(x, y) == ramp.at(std::max(0, x - 3), y));
  }

  Raster flat(8, 8, 3, 0.4f);
  FlowField wild(8, 8);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) wild.set(x, y, {1.7 * x - 5.0, -0.3 * y}, true);
  }
  CHECK(warp(flat, wild) == flat);
  CHECK_THROWS_AS(warp(flat, FlowField(7, 8)), ShapeError);
}

TEST_CASE("warp is intensity bounded and invertible in the interior") {
  const testing::WaveTexture tex(3);
  const auto img = tex.render(64, 64);
  FlowField f(64, 64), g(64, 64);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      f.set(x, y, {1.25, -0.5}, true);
      g.set(x, y, {-1.25, 0.5}, true);
    }
  }
  const auto w = warp(img, f);
  const auto [lo, hi] = std::minmax_element(img.data().begin(), img.data().end());
  for (float v : w.data()) {
    CHECK(v >= *lo);
    CHECK(v <= *hi);
  }
  const auto back = warp(w, g);
  double worst = 0.0;
  for (int y = 8; y < 56; ++y) {
    for (int x = 8; x < 56; ++x) worst = std::max(worst, std::abs(double(back.at(x, y)) - img.at(x, y)));
  }
  CHECK(worst < 1e-3 * 8);  // two bilinear passes on a band-limited texture
}

TEST_CASE("png and pnm ingest") {
  const auto dir = testing::scratch_dir("imageio");
  Raster rgb(5, 3, 3);
  for (int y = 0; y < 3; ++y) {
    for (int x = 0; x < 5; ++x) {
      for (int c = 0; c < 3; ++c) rgb.set(x, y, c, ((x * 37 + y * 11 + c * 53) % 256) / 255.0f);
    }
  }
  write_png(dir / "a.png", rgb);
  const auto back = read_image(dir / "a.png");
  REQUIRE(back.same_size(rgb));
  for (std::size_t i = 0; i < rgb.data().size(); ++i) {
    CHECK(back.data()[i] == doctest::Approx(rgb.data()[i]).epsilon(1e-6));
  }

  {
    std::ofstream pgm(dir / "b.pgm");
    pgm << "P2\n# comment\n3 2\n255\n0 128 255\n10 20 30\n";
  }
  const auto g = read_image(dir / "b.pgm");
  CHECK(g.width() == 3);
  CHECK(g.channels() == 1);
  CHECK(g.at(1, 0) == doctest::Approx(128.0 / 255.0));
  CHECK(g.at(2, 1) == doctest::Approx(30.0 / 255.0));

  const auto list = list_images(dir);
  REQUIRE(list.size() == 2);
  CHECK(list[0].filename() == "a.png");
  CHECK_THROWS_AS(read_image(dir / "nope.png"), MissingInputError);
}

TEST_CASE("16-bit png round trip") {
  const auto dir = testing::scratch_dir("png16");
  std::vector<std::uint16_t> s{0, 1, 32768, 65535, 1234, 4321};
  write_png16(dir / "x.png", 3, 1, 2, s);
  const auto r = read_png16(dir / "x.png");
  CHECK(r.width == 3);
  CHECK(r.channels == 2);
  CHECK(r.samples == s);
}
