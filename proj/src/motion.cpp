#include "bogwatch/motion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bogwatch/error.hpp"
#include "bogwatch/image_io.hpp"

namespace bogwatch::motion {

namespace {

// Plain float plane used internally; intensities are not clamped here.
struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> px;

  Plane() = default;
  Plane(int width, int height, double fill = 0.0)
      : w(width), h(height), px(static_cast<std::size_t>(width) * height, fill) {}

  double& operator()(int x, int y) { return px[static_cast<std::size_t>(y) * w + x]; }
  double operator()(int x, int y) const { return px[static_cast<std::size_t>(y) * w + x]; }

  double clamped(int x, int y) const {
    return (*this)(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  }

  double bilinear(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(w - 1));
    y = std::clamp(y, 0.0, static_cast<double>(h - 1));
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    return (1 - fy) * ((1 - fx) * (*this)(x0, y0) + fx * (*this)(x1, y0)) +
           fy * ((1 - fx) * (*this)(x0, y1) + fx * (*this)(x1, y1));
  }
};

Plane to_plane(const Raster& img) {
  const Raster gray = imaging::to_gray(img);
  Plane p(gray.width(), gray.height());
  std::copy(gray.data().begin(), gray.data().end(), p.px.begin());
  return p;
}

// 5-tap binomial blur followed by 2x decimation.
Plane pyr_down(const Plane& src) {
  static constexpr double k[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  Plane tmp(src.w, src.h);
  for (int y = 0; y < src.h; ++y) {
    for (int x = 0; x < src.w; ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) acc += k[i + 2] * src.clamped(x + i, y);
      tmp(x, y) = acc;
    }
  }
  Plane out((src.w + 1) / 2, (src.h + 1) / 2);
  for (int y = 0; y < out.h; ++y) {
    for (int x = 0; x < out.w; ++x) {
      double acc = 0.0;
      for (int i = -2; i <= 2; ++i) acc += k[i + 2] * tmp.clamped(2 * x, 2 * y + i);
      out(x, y) = acc;
    }
  }
  return out;
}

// Mean over a (2r+1)^2 window, border-replicated, via separable running sums.
Plane box_mean(const Plane& src, int r) {
  const double norm = 1.0 / ((2.0 * r + 1) * (2.0 * r + 1));
  Plane tmp(src.w, src.h);
  for (int y = 0; y < src.h; ++y) {
    double acc = 0.0;
    for (int i = -r; i <= r; ++i) acc += src.clamped(i, y);
    for (int x = 0; x < src.w; ++x) {
      tmp(x, y) = acc;
      acc += src.clamped(x + r + 1, y) - src.clamped(x - r, y);
    }
  }
  Plane out(src.w, src.h);
  for (int x = 0; x < src.w; ++x) {
    double acc = 0.0;
    for (int i = -r; i <= r; ++i) acc += tmp.clamped(x, i);
    for (int y = 0; y < src.h; ++y) {
      out(x, y) = acc * norm;
      acc += tmp.clamped(x, y + r + 1) - tmp.clamped(x, y - r);
    }
  }
  return out;
}

struct Tensor {
  Plane gx, gy;      // template gradients
  Plane gxx, gxy, gyy;  // window means of gradient products
};

Tensor structure_tensor(const Plane& img, int radius) {
  Tensor t{Plane(img.w, img.h), Plane(img.w, img.h), {}, {}, {}};
  Plane xx(img.w, img.h), xy(img.w, img.h), yy(img.w, img.h);
  for (int y = 0; y < img.h; ++y) {
    for (int x = 0; x < img.w; ++x) {
      const double gx = 0.5 * (img.clamped(x + 1, y) - img.clamped(x - 1, y));
      const double gy = 0.5 * (img.clamped(x, y + 1) - img.clamped(x, y - 1));
      t.gx(x, y) = gx;
      t.gy(x, y) = gy;
      xx(x, y) = gx * gx;
      xy(x, y) = gx * gy;
      yy(x, y) = gy * gy;
    }
  }
  t.gxx = box_mean(xx, radius);
  t.gxy = box_mean(xy, radius);
  t.gyy = box_mean(yy, radius);
  return t;
}

double min_eigenvalue(double a, double b, double c) {
  const double half_trace = 0.5 * (a + c);
  const double disc = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
  return half_trace - disc;
}

}  // namespace

FlowField lucas_kanade_flow(const Raster& prev, const Raster& next, const LkParams& params) {
  if (!prev.same_size(next)) throw ShapeError("lucas_kanade_flow: frame dimensions differ");
  if (params.levels < 1) throw Error("lucas_kanade_flow: levels must be >= 1");
  if (params.window < 3 || params.window % 2 == 0) {
    throw Error("lucas_kanade_flow: window must be odd and >= 3");
  }
  const int radius = params.window / 2;

  std::vector<Plane> pyr_prev{to_plane(prev)};
  std::vector<Plane> pyr_next{to_plane(next)};
  for (int l = 1; l < params.levels; ++l) {
    if (pyr_prev.back().w < 2 * radius + 1 || pyr_prev.back().h < 2 * radius + 1) break;
    pyr_prev.push_back(pyr_down(pyr_prev.back()));
    pyr_next.push_back(pyr_down(pyr_next.back()));
  }

  Plane fu, fv;
  Tensor tensor;
  for (int level = static_cast<int>(pyr_prev.size()) - 1; level >= 0; --level) {
    const Plane& i0 = pyr_prev[level];
    const Plane& i1 = pyr_next[level];
    Plane u(i0.w, i0.h), v(i0.w, i0.h);
    if (!fu.px.empty()) {
      for (int y = 0; y < i0.h; ++y) {
        for (int x = 0; x < i0.w; ++x) {
          u(x, y) = 2.0 * fu.bilinear(0.5 * x, 0.5 * y);
          v(x, y) = 2.0 * fv.bilinear(0.5 * x, 0.5 * y);
        }
      }
    }
    tensor = structure_tensor(i0, radius);

    // Each window sample is linearised about its own current flow, so the
    // solve below is a Newton step on the shared translation model.
    Plane bx(i0.w, i0.h), by(i0.w, i0.h);
    for (int it = 0; it < params.iterations; ++it) {
      for (int y = 0; y < i0.h; ++y) {
        for (int x = 0; x < i0.w; ++x) {
          const double gx = tensor.gx(x, y);
          const double gy = tensor.gy(x, y);
          const double e = i1.bilinear(x + u(x, y), y + v(x, y)) - i0(x, y) - gx * u(x, y) - gy * v(x, y);
          bx(x, y) = gx * e;
          by(x, y) = gy * e;
        }
      }
      const Plane mbx = box_mean(bx, radius);
      const Plane mby = box_mean(by, radius);
      double max_step = 0.0;
      for (int y = 0; y < i0.h; ++y) {
        for (int x = 0; x < i0.w; ++x) {
          const double a = tensor.gxx(x, y);
          const double b = tensor.gxy(x, y);
          const double c = tensor.gyy(x, y);
          if (min_eigenvalue(a, b, c) < params.min_eigenvalue) continue;
          const double det = a * c - b * b;
          const double nu = -(c * mbx(x, y) - b * mby(x, y)) / det;
          const double nv = -(a * mby(x, y) - b * mbx(x, y)) / det;
          max_step = std::max(max_step, std::abs(nu - u(x, y)) + std::abs(nv - v(x, y)));
          u(x, y) = nu;
          v(x, y) = nv;
        }
      }
      if (max_step < 1e-3) break;
    }
    fu = std::move(u);
    fv = std::move(v);
  }

  // Window mean of the photometric error left after convergence.
  const Plane& i0 = pyr_prev.front();
  const Plane& i1 = pyr_next.front();
  Plane err(i0.w, i0.h);
  for (int y = 0; y < i0.h; ++y) {
    for (int x = 0; x < i0.w; ++x) err(x, y) = std::abs(i1.bilinear(x + fu(x, y), y + fv(x, y)) - i0(x, y));
  }
  const Plane residual = box_mean(err, radius);

  FlowField out(prev.width(), prev.height());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const bool textured = min_eigenvalue(tensor.gxx(x, y), tensor.gxy(x, y), tensor.gyy(x, y)) >=
                            params.min_eigenvalue;
      const bool matched = !(params.max_residual > 0.0) || residual(x, y) <= params.max_residual;
      const double tx = x + fu(x, y);
      const double ty = y + fv(x, y);
      const bool inside = tx >= 0.0 && ty >= 0.0 && tx <= out.width() - 1 && ty <= out.height() - 1;
      if (textured && matched && inside && std::isfinite(tx) && std::isfinite(ty)) {
        out.set(x, y, {fu(x, y), fv(x, y)}, true);
      }
    }
  }
  return out;
}

FlowField consistency_check(const FlowField& fwd, const FlowField& bwd, double tol) {
  if (!fwd.same_size(bwd)) throw ShapeError("consistency_check: flow dimensions differ");
  FlowField out = fwd;
  for (int y = 0; y < fwd.height(); ++y) {
    for (int x = 0; x < fwd.width(); ++x) {
      if (!fwd.valid(x, y)) continue;
      const Vec2 f = fwd.at(x, y);
      const Vec2 back = bwd.sample(x + f.x, y + f.y);
      if (!((f + back).norm() <= tol)) out.invalidate(x, y);
    }
  }
  return out;
}

FlowField mask_flow(const FlowField& flow, const Raster& prob) {
  if (!flow.same_size(prob)) throw ShapeError("mask_flow: dimension mismatch");
  FlowField out(flow.width(), flow.height());
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      const double p = prob.at(x, y);
      out.set(x, y, p * flow.at(x, y), flow.valid(x, y));
    }
  }
  return out;
}

FlowField exclude_disc(const FlowField& flow, Pixel center, double radius) {
  FlowField out = flow;
  if (radius <= 0.0) return out;
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (std::hypot(x - center.x, y - center.y) <= radius) out.invalidate(x, y);
    }
  }
  return out;
}

MotionWeights MotionWeights::for_width(int image_width) {
  MotionWeights w;
  w.sigma_d = 0.5 * image_width;
  return w;
}

GlobalMotion global_motion(const FlowField& flow, const Raster& prob, Pixel sun_px,
                           const MotionWeights& weights) {
  if (!flow.same_size(prob)) throw ShapeError("global_motion: dimension mismatch");
  if (!(weights.sigma_d > 0.0)) throw Error("global_motion: sigma_d must be positive");
  const double inv_two_sigma2 = 1.0 / (2.0 * weights.sigma_d * weights.sigma_d);
  double sum_gamma = 0.0;
  double sum_attainable = 0.0;
  double vx = 0.0;
  double vy = 0.0;
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      if (!flow.valid(x, y)) continue;
      const Vec2 d{sun_px.x - x, sun_px.y - y};
      const Vec2 v = flow.at(x, y);
      const double dist = d.norm();
      const double f = std::exp(-dist * dist * inv_two_sigma2);
      const double m = prob.at(x, y);
      const double h = weights.prob_exponent == 1.0 ? m : std::pow(m, weights.prob_exponent);
      double g = 1.0;
      const double speed = v.norm();
      if (weights.use_direction && speed > 0.0) {
        // At the sun pixel itself the direction is undefined; treat as aligned.
        g = dist > 0.0 ? std::max(0.0, (v.x * d.x + v.y * d.y) / (speed * dist)) : 1.0;
      }
      const double gamma = h * f * g;
      sum_gamma += gamma;
      sum_attainable += f;
      vx += gamma * v.x;
      vy += gamma * v.y;
    }
  }
  if (sum_gamma < 1e-9) return {};
  return {{vx / sum_gamma, vy / sum_gamma}, std::clamp(sum_gamma / sum_attainable, 0.0, 1.0)};
}

std::vector<std::uint16_t> encode_flow(const FlowField& flow) {
  std::vector<std::uint16_t> out(flow.pixel_count() * 2);
  auto q = [](double d) {
    const long v = std::lround(d / kFlowQuantum) + kFlowZero;
    return static_cast<std::uint16_t>(std::clamp<long>(v, 0, 65535));
  };
  std::size_t i = 0;
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) {
      out[i++] = q(flow.u(x, y));
      out[i++] = q(flow.v(x, y));
    }
  }
  return out;
}

FlowField decode_flow(int width, int height, const std::vector<std::uint16_t>& samples,
                      const Raster& validity) {
  if (samples.size() != static_cast<std::size_t>(width) * height * 2 || validity.width() != width ||
      validity.height() != height) {
    throw ShapeError("decode_flow: dimension mismatch");
  }
  FlowField out(width, height);
  std::size_t i = 0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = (static_cast<int>(samples[i]) - kFlowZero) * kFlowQuantum;
      const double v = (static_cast<int>(samples[i + 1]) - kFlowZero) * kFlowQuantum;
      i += 2;
      out.set(x, y, {u, v}, validity.at(x, y) >= 0.5f);
    }
  }
  return out;
}

void write_flow(const std::filesystem::path& flow_png, const std::filesystem::path& valid_png,
                const FlowField& flow) {
  imaging::write_png16(flow_png, flow.width(), flow.height(), 2, encode_flow(flow));
  Raster mask(flow.width(), flow.height(), 1);
  for (int y = 0; y < flow.height(); ++y) {
    for (int x = 0; x < flow.width(); ++x) mask.set(x, y, flow.valid(x, y) ? 1.0f : 0.0f);
  }
  imaging::write_png(valid_png, mask);
}

FlowField read_flow(const std::filesystem::path& flow_png, const std::filesystem::path& valid_png) {
  const auto png = imaging::read_png16(flow_png);
  if (png.channels != 2) throw ChannelError("flow file must have 2 channels");
  return decode_flow(png.width, png.height, png.samples, imaging::read_image(valid_png));
}

}  // namespace bogwatch::motion
