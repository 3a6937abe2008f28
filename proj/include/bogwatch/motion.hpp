#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "bogwatch/raster.hpp"

namespace bogwatch::motion {

using imaging::FlowField;
using imaging::Pixel;
using imaging::Raster;
using imaging::Vec2;

struct LkParams {
  int levels = 3;
  int window = 15;  // odd, >= 3
  int iterations = 10;
  // Smaller eigenvalue of the window-averaged structure tensor, unit-interval
  // intensities and per-pixel central-difference gradients.
  double min_eigenvalue = 1e-4;
  // Window mean of |next(q + flow) - prev(q)| above which a pixel is
  // invalidated as unmatched; <= 0 disables the test.
  double max_residual = 0.02;
};

/// Dense coarse-to-fine iterative Lucas-Kanade flow from `prev` to `next`:
/// next(q + flow(q)) ~ prev(q). Colour input is converted to gray.
/// Pixels with a degenerate structure tensor, a large final photometric
/// residual, or a displaced position outside the image are marked invalid
/// with zero flow.
FlowField lucas_kanade_flow(const Raster& prev, const Raster& next, const LkParams& params = {});

/// Keeps q valid iff |fwd(q) + bwd(q + fwd(q))| <= tol (bilinear bwd sample).
FlowField consistency_check(const FlowField& fwd, const FlowField& bwd, double tol = 1.0);

/// Scales each displacement by the cloud probability; validity unchanged.
FlowField mask_flow(const FlowField& flow, const Raster& prob);

/// Invalidates every pixel within `radius` of `center`; radius 0 is a no-op.
FlowField exclude_disc(const FlowField& flow, Pixel center, double radius);

/// Component functions of the per-pixel weight gamma = h(m) f(|d|) g(v, d):
/// h(m) = m^prob_exponent, f(r) = exp(-r^2 / (2 sigma_d^2)),
/// g(v, d) = max(0, cos angle(v, d)) (1 when |v| = 0, or when disabled).
struct MotionWeights {
  double sigma_d = 128.0;
  bool use_direction = true;
  double prob_exponent = 1.0;

  /// sigma_d = half the image width.
  static MotionWeights for_width(int image_width);
};

struct GlobalMotion {
  Vec2 v;                   // pixels per frame
  double confidence = 0.0;  // in [0, 1]
};

/// Normalised weighted mean of the valid flow vectors, weighted by gamma.
/// `flow` is the unmasked flow; the cloud probability enters through h.
/// confidence = sum(gamma) / sum over valid pixels of f(|d|).
GlobalMotion global_motion(const FlowField& flow, const Raster& prob, Pixel sun_px,
                           const MotionWeights& weights);

// Flow files: 2-channel 16-bit samples, value = round(64 * d) + 32768,
// clamped to [0, 65535]; validity as a separate 8-bit mask (255 = valid).
inline constexpr double kFlowQuantum = 1.0 / 64.0;
inline constexpr int kFlowZero = 32768;

std::vector<std::uint16_t> encode_flow(const FlowField& flow);
FlowField decode_flow(int width, int height, const std::vector<std::uint16_t>& samples,
                      const Raster& validity);

void write_flow(const std::filesystem::path& flow_png, const std::filesystem::path& valid_png,
                const FlowField& flow);
FlowField read_flow(const std::filesystem::path& flow_png, const std::filesystem::path& valid_png);

}  // namespace bogwatch::motion
