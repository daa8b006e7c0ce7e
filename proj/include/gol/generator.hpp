#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gol/core.hpp"
#include "gol/error.hpp"
#include "gol/random.hpp"

namespace gol {

enum class TransformKind { Geometric, Photometric };

// How the per-sample intensity is drawn from the magnitude theta.
enum class Draw { Symmetric, OneSided };

struct TransformInfo {
  std::string_view name;
  TransformKind kind;
  Draw draw;
  double lower;
  double upper;
};

// Registered generalization functions, in application order. Every function
// is the identity at magnitude 0.
inline constexpr std::array<TransformInfo, 12> kTransforms{{
    {"rotation", TransformKind::Geometric, Draw::Symmetric, 0.0, 45.0},  // degrees
    {"scale", TransformKind::Geometric, Draw::Symmetric, 0.0, 0.4},      // relative
    {"translate_x", TransformKind::Geometric, Draw::Symmetric, 0.0, 0.25},
    {"translate_y", TransformKind::Geometric, Draw::Symmetric, 0.0, 0.25},
    {"shear", TransformKind::Geometric, Draw::Symmetric, 0.0, 0.3},
    {"blur", TransformKind::Photometric, Draw::OneSided, 0.0, 2.5},  // sigma, pixels
    {"noise", TransformKind::Photometric, Draw::OneSided, 0.0, 0.15},
    {"salt_pepper", TransformKind::Photometric, Draw::OneSided, 0.0, 0.05},
    {"brightness", TransformKind::Photometric, Draw::Symmetric, 0.0, 0.4},
    {"contrast", TransformKind::Photometric, Draw::Symmetric, 0.0, 0.5},
    {"occlusion", TransformKind::Photometric, Draw::OneSided, 0.0, 0.2},  // area fraction
    {"background", TransformKind::Photometric, Draw::OneSided, 0.0, 0.5},  // blend weight
}};

inline constexpr std::size_t kParamCount = kTransforms.size();

inline std::optional<std::size_t> transform_index(std::string_view name) {
  for (std::size_t i = 0; i < kTransforms.size(); ++i)
    if (kTransforms[i].name == name) return i;
  return std::nullopt;
}

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
  friend bool operator==(const Bounds&, const Bounds&) = default;
};

/// Decision vector: one magnitude per registered transform, with box bounds.
struct GeneratorParams {
  std::vector<double> theta;
  std::vector<Bounds> bounds;

  static std::vector<Bounds> default_bounds() {
    std::vector<Bounds> b;
    for (const auto& t : kTransforms) b.push_back({t.lower, t.upper});
    return b;
  }

  static GeneratorParams identity(std::vector<Bounds> b = default_bounds()) {
    return {std::vector<double>(kParamCount, 0.0), std::move(b)};
  }

  std::size_t size() const noexcept { return theta.size(); }

  bool within_bounds() const noexcept {
    if (theta.size() != bounds.size()) return false;
    for (std::size_t i = 0; i < theta.size(); ++i)
      if (!(theta[i] >= bounds[i].lower && theta[i] <= bounds[i].upper)) return false;
    return true;
  }

  void validate() const {
    if (theta.size() != kParamCount || bounds.size() != kParamCount)
      throw ParameterError("generator parameters need " + std::to_string(kParamCount) +
                           " entries, got " + std::to_string(theta.size()));
    for (std::size_t i = 0; i < kParamCount; ++i) {
      if (bounds[i].lower > bounds[i].upper || bounds[i].lower < 0.0)
        throw ParameterError("invalid bounds for " + std::string(kTransforms[i].name));
      if (!(theta[i] >= bounds[i].lower && theta[i] <= bounds[i].upper))
        throw ParameterError(std::string(kTransforms[i].name) + " magnitude " +
                             std::to_string(theta[i]) + " outside [" +
                             std::to_string(bounds[i].lower) + ", " +
                             std::to_string(bounds[i].upper) + "]");
    }
  }

  friend bool operator==(const GeneratorParams&, const GeneratorParams&) = default;
};

/// sigma_i(t) = sigma0_i + t * delta_i
struct VarianceSchedule {
  std::vector<double> sigma0;
  std::vector<double> delta;

  static VarianceSchedule zero() {
    return {std::vector<double>(kParamCount, 0.0), std::vector<double>(kParamCount, 0.0)};
  }

  // Grows each coordinate by a fixed fraction of its bound width per episode.
  static VarianceSchedule proportional(double sigma0_fraction, double delta_fraction,
                                       std::span<const Bounds> bounds) {
    VarianceSchedule s;
    for (const auto& b : bounds) {
      s.sigma0.push_back(sigma0_fraction * (b.upper - b.lower));
      s.delta.push_back(delta_fraction * (b.upper - b.lower));
    }
    return s;
  }

  void validate() const {
    if (sigma0.size() != kParamCount || delta.size() != kParamCount)
      throw ConfigError("variance schedule needs " + std::to_string(kParamCount) + " entries");
    for (std::size_t i = 0; i < kParamCount; ++i)
      if (!(sigma0[i] >= 0.0) || !(delta[i] >= 0.0))
        throw ConfigError("variance schedule entries must be nonnegative");
  }

  double sigma(std::size_t i, int t) const { return sigma0.at(i) + static_cast<double>(t) * delta.at(i); }
};

namespace detail {

// 2x3 affine map in centred pixel coordinates.
struct Affine {
  double a = 1, b = 0, tx = 0;
  double c = 0, d = 1, ty = 0;

  // this ∘ rhs (apply rhs first)
  Affine then(const Affine& next) const {
    return {next.a * a + next.b * c, next.a * b + next.b * d, next.a * tx + next.b * ty + next.tx,
            next.c * a + next.d * c, next.c * b + next.d * d, next.c * tx + next.d * ty + next.ty};
  }
  Affine inverse() const {
    const double det = a * d - b * c;
    const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
    return {ia, ib, -(ia * tx + ib * ty), ic, id, -(ic * tx + id * ty)};
  }
};

inline Image warp(const Image& src, const Affine& forward) {
  const Affine inv = forward.inverse();
  const double cx = (src.width() - 1) / 2.0;
  const double cy = (src.height() - 1) / 2.0;
  Image out(src.width(), src.height(), src.channels());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) {
      const double u = x - cx, v = y - cy;
      const double sx = inv.a * u + inv.b * v + inv.tx + cx;
      const double sy = inv.c * u + inv.d * v + inv.ty + cy;
      for (int ch = 0; ch < src.channels(); ++ch) out.at(x, y, ch) = sample_bilinear(src, sx, sy, ch);
    }
  return out;
}

inline Image gaussian_blur(const Image& src, double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  double norm = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * i * i / (sigma * sigma));
    norm += k[static_cast<std::size_t>(i + radius)];
  }
  for (double& v : k) v /= norm;

  const int w = src.width(), h = src.height(), nc = src.channels();
  Image tmp(w, h, nc), out(w, h, nc);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += k[static_cast<std::size_t>(i + radius)] * src.at(std::clamp(x + i, 0, w - 1), y, c);
        tmp.at(x, y, c) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < nc; ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i)
          acc += k[static_cast<std::size_t>(i + radius)] * tmp.at(x, std::clamp(y + i, 0, h - 1), c);
        out.at(x, y, c) = static_cast<float>(std::clamp(acc, 0.0, 1.0));
      }
  return out;
}

inline float clamp01(double v) { return static_cast<float>(std::clamp(v, 0.0, 1.0)); }

}  // namespace detail

// Intensity for one sample: uniform on [-theta, theta] or [0, theta].
inline double draw_intensity(const TransformInfo& info, double theta, Rng& rng) {
  if (theta == 0.0) return 0.0;
  const double lo = info.draw == Draw::Symmetric ? -theta : 0.0;
  return std::uniform_real_distribution<double>(lo, theta)(rng);
}

// Applies photometric transform `index` with an already drawn intensity.
// Returns false when the intensity is the identity value (image untouched).
inline bool apply_photometric(Image& img, std::size_t index, double v, Rng& rng) {
  if (v == 0.0) return false;
  auto px = img.pixels();
  const int nc = img.channels();
  switch (index) {
    case 5:  // blur
      img = detail::gaussian_blur(img, v);
      return true;
    case 6: {  // additive gaussian noise
      std::normal_distribution<double> n(0.0, v);
      for (float& p : px) p = detail::clamp01(p + n(rng));
      return true;
    }
    case 7: {  // salt and pepper
      std::uniform_real_distribution<double> u(0.0, 1.0);
      const std::size_t pixels = px.size() / static_cast<std::size_t>(nc);
      for (std::size_t i = 0; i < pixels; ++i) {
        if (u(rng) >= v) continue;
        const float val = u(rng) < 0.5 ? 0.0f : 1.0f;
        for (int c = 0; c < nc; ++c) px[i * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)] = val;
      }
      return true;
    }
    case 8:  // brightness offset
      for (float& p : px) p = detail::clamp01(p + v);
      return true;
    case 9: {  // contrast about the image mean
      double mean = 0.0;
      for (float p : px) mean += p;
      mean /= static_cast<double>(px.size());
      const double gain = 1.0 + v;
      for (float& p : px) p = detail::clamp01(mean + gain * (p - mean));
      return true;
    }
    case 10: {  // occlusion patch
      const double area = v * img.width() * img.height();
      const int side = std::min({static_cast<int>(std::lround(std::sqrt(area))), img.width(), img.height()});
      if (side <= 0) return false;
      const int x0 = std::uniform_int_distribution<int>(0, img.width() - side)(rng);
      const int y0 = std::uniform_int_distribution<int>(0, img.height() - side)(rng);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::array<float, 3> color{};
      for (int c = 0; c < nc; ++c) color[static_cast<std::size_t>(c)] = static_cast<float>(u(rng));
      for (int y = y0; y < y0 + side; ++y)
        for (int x = x0; x < x0 + side; ++x)
          for (int c = 0; c < nc; ++c) img.at(x, y, c) = color[static_cast<std::size_t>(c)];
      return true;
    }
    case 11: {  // blend outside the inscribed circle toward a random colour
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::array<double, 3> color{};
      for (int c = 0; c < nc; ++c) color[static_cast<std::size_t>(c)] = u(rng);
      const double cx = (img.width() - 1) / 2.0, cy = (img.height() - 1) / 2.0;
      const double r = std::min(img.width(), img.height()) / 2.0;
      for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) {
          if (std::hypot(x - cx, y - cy) <= r) continue;
          for (int c = 0; c < nc; ++c)
            img.at(x, y, c) = detail::clamp01((1.0 - v) * img.at(x, y, c) + v * color[static_cast<std::size_t>(c)]);
        }
      return true;
    }
    default:
      throw ParameterError("transform " + std::to_string(index) + " is not photometric");
  }
}

// Forward affine contribution of geometric transform `index` at intensity v.
inline detail::Affine geometric_affine(std::size_t index, double v, int width, int height) {
  switch (index) {
    case 0: {
      const double r = v * std::numbers::pi / 180.0;
      return {std::cos(r), -std::sin(r), 0, std::sin(r), std::cos(r), 0};
    }
    case 1:
      return {1 + v, 0, 0, 0, 1 + v, 0};
    case 2:
      return {1, 0, v * width, 0, 1, 0};
    case 3:
      return {1, 0, 0, 0, 1, v * height};
    case 4:
      return {1, v, 0, 0, 1, 0};
    default:
      throw ParameterError("transform " + std::to_string(index) + " is not geometric");
  }
}

// Snaps intensities to the 8-bit grid so generated samples match what an
// image file can hold. Idempotent on images loaded from 8-bit files.
inline void quantize8(Image& img) {
  for (float& p : img.pixels()) p = static_cast<float>(std::lround(p * 255.0f)) / 255.0f;
}

/// Runs the registered transforms in order. Consecutive geometric stages are
/// folded into one affine resample so the image is interpolated once.
inline Image apply_pipeline(const Image& image, const GeneratorParams& params, Rng& rng) {
  params.validate();
  Image out = image;
  detail::Affine pending;
  bool have_warp = false;
  bool changed = false;
  for (std::size_t i = 0; i < kTransforms.size(); ++i) {
    const auto& info = kTransforms[i];
    const double v = draw_intensity(info, params.theta[i], rng);
    if (info.kind == TransformKind::Geometric) {
      if (v != 0.0) {
        pending = pending.then(geometric_affine(i, v, out.width(), out.height()));
        have_warp = true;
      }
      continue;
    }
    if (have_warp) {
      out = detail::warp(out, pending);
      pending = {};
      have_warp = false;
      changed = true;
    }
    changed = apply_photometric(out, i, v, rng) || changed;
  }
  if (have_warp) {
    out = detail::warp(out, pending);
    changed = true;
  }
  if (changed) quantize8(out);
  return out;
}

// Per-class sample counts: floor(m/K), with the first m mod K classes getting one more.
inline std::vector<std::size_t> class_allocation(std::size_t m, int classes) {
  std::vector<std::size_t> n(static_cast<std::size_t>(classes), m / static_cast<std::size_t>(classes));
  for (std::size_t k = 0; k < m % static_cast<std::size_t>(classes); ++k) ++n[k];
  return n;
}

/// m labelled samples, grouped by class. Sample j of class k uses the stream
/// derive_seed(seed, {k, j}), so any single sample can be reproduced alone.
inline SyntheticDataset generate(const OneShotSet& s, const GeneratorParams& params, std::size_t m,
                                 std::uint64_t seed) {
  const int k = s.classes();
  if (m < static_cast<std::size_t>(k))
    throw ParameterError("cannot generate " + std::to_string(m) + " samples for " + std::to_string(k) +
                         " classes");
  params.validate();
  SyntheticDataset d;
  d.classes = k;
  d.provenance = {params.theta, seed};
  d.samples.reserve(m);
  const auto alloc = class_allocation(m, k);
  for (int c = 0; c < k; ++c)
    for (std::size_t j = 0; j < alloc[static_cast<std::size_t>(c)]; ++j) {
      Rng rng = make_rng(seed, {static_cast<std::uint64_t>(c), j});
      d.samples.push_back({apply_pipeline(s.templ(c), params, rng), c});
    }
  return d;
}

/// Gaussian draw around `mean` with the episode-t standard deviations, clamped to bounds.
inline GeneratorParams sample_params(const GeneratorParams& mean, const VarianceSchedule& schedule, int t,
                                     Rng& rng) {
  if (t < 1) throw ParameterError("episode index must be >= 1");
  schedule.validate();
  if (mean.theta.size() != kParamCount || mean.bounds.size() != kParamCount)
    throw ParameterError("mean parameter vector has the wrong length");
  GeneratorParams out = mean;
  for (std::size_t i = 0; i < kParamCount; ++i) {
    const double sd = schedule.sigma(i, t);
    double v = mean.theta[i];
    if (sd > 0.0) v = std::normal_distribution<double>(mean.theta[i], sd)(rng);
    out.theta[i] = std::clamp(v, mean.bounds[i].lower, mean.bounds[i].upper);
  }
  return out;
}

}  // namespace gol
