#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gol/error.hpp"
#include "gol/random.hpp"

namespace gol {

/// Dense image with interleaved channels, row-major, intensities in [0,1].
class Image {
public:
  Image() = default;

  Image(int width, int height, int channels, float fill = 0.0f)
      : width_(width), height_(height), channels_(channels) {
    check_shape();
    if (!(fill >= 0.0f && fill <= 1.0f)) throw ParameterError("image fill value outside [0,1]");
    pixels_.assign(size(), fill);
  }

  Image(int width, int height, int channels, std::vector<float> pixels)
      : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
    check_shape();
    if (pixels_.size() != size())
      throw ParameterError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                           std::to_string(width) + "x" + std::to_string(height) + "x" +
                           std::to_string(channels));
    for (float v : pixels_)
      if (!(v >= 0.0f && v <= 1.0f)) throw ParameterError("pixel value outside [0,1]");
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_) *
           static_cast<std::size_t>(channels_);
  }
  bool empty() const noexcept { return pixels_.empty(); }

  float at(int x, int y, int c = 0) const noexcept { return pixels_[index(x, y, c)]; }
  float& at(int x, int y, int c = 0) noexcept { return pixels_[index(x, y, c)]; }

  std::span<const float> pixels() const noexcept { return pixels_; }
  std::span<float> pixels() noexcept { return pixels_; }

  bool same_shape(const Image& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }
  void check_shape() const {
    if (width_ <= 0 || height_ <= 0) throw ParameterError("image dimensions must be positive");
    if (channels_ != 1 && channels_ != 3) throw ParameterError("image must have 1 or 3 channels");
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> pixels_;
};

struct LabeledSample {
  Image image;
  int label = 0;

  friend bool operator==(const LabeledSample&, const LabeledSample&) = default;
};

/// One template per class; entry k carries label k.
class OneShotSet {
public:
  OneShotSet() = default;

  explicit OneShotSet(std::vector<LabeledSample> entries) : entries_(std::move(entries)) {
    const int k = static_cast<int>(entries_.size());
    if (k == 0) throw DataError("one-shot set is empty");
    std::vector<bool> seen(entries_.size(), false);
    for (const auto& e : entries_) {
      if (e.label < 0 || e.label >= k)
        throw DataError("one-shot label " + std::to_string(e.label) + " outside [0," +
                        std::to_string(k) + ")");
      if (seen[static_cast<std::size_t>(e.label)])
        throw DataError("one-shot label " + std::to_string(e.label) + " appears twice");
      seen[static_cast<std::size_t>(e.label)] = true;
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.label < b.label; });
  }

  int classes() const noexcept { return static_cast<int>(entries_.size()); }
  const Image& templ(int k) const { return entries_.at(static_cast<std::size_t>(k)).image; }
  std::span<const LabeledSample> entries() const noexcept { return entries_; }

private:
  std::vector<LabeledSample> entries_;
};

/// Small set of real labelled samples used to score generated data.
class RegularizationSet {
public:
  RegularizationSet() = default;
  RegularizationSet(std::vector<LabeledSample> samples, int classes)
      : samples_(std::move(samples)), classes_(classes) {
    if (classes_ <= 0) throw DataError("regularization set needs a positive class count");
    for (const auto& s : samples_)
      if (s.label < 0 || s.label >= classes_)
        throw DataError("regularization label " + std::to_string(s.label) + " outside [0," +
                        std::to_string(classes_) + ")");
  }

  int classes() const noexcept { return classes_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const LabeledSample> samples() const noexcept { return samples_; }

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> q(static_cast<std::size_t>(classes_), 0);
    for (const auto& s : samples_) ++q[static_cast<std::size_t>(s.label)];
    return q;
  }

private:
  std::vector<LabeledSample> samples_;
  int classes_ = 0;
};

struct Provenance {
  std::vector<double> theta;
  std::uint64_t seed = 0;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SyntheticDataset {
  std::vector<LabeledSample> samples;
  int classes = 0;
  Provenance provenance;

  std::size_t size() const noexcept { return samples.size(); }

  std::vector<std::size_t> counts() const {
    std::vector<std::size_t> q(static_cast<std::size_t>(classes), 0);
    for (const auto& s : samples) ++q.at(static_cast<std::size_t>(s.label));
    return q;
  }

  // Throws naming the first class without samples.
  void require_coverage() const {
    if (samples.empty()) throw DataError("dataset is empty");
    const auto q = counts();
    for (std::size_t k = 0; k < q.size(); ++k)
      if (q[k] == 0) throw DataError("dataset has no samples of class " + std::to_string(k));
  }

  friend bool operator==(const SyntheticDataset&, const SyntheticDataset&) = default;
};

// Soft sizing checks: m >> K for synthetic data and dim(e) << m.
inline std::vector<std::string> sizing_warnings(int classes, std::size_t synthetic_count,
                                                std::size_t regularization_count) {
  std::vector<std::string> out;
  if (synthetic_count < 10 * static_cast<std::size_t>(classes))
    out.push_back("synthetic sample count " + std::to_string(synthetic_count) +
                  " is below 10x the class count " + std::to_string(classes));
  if (regularization_count * 10 > synthetic_count)
    out.push_back("regularization set (" + std::to_string(regularization_count) +
                  ") is not much smaller than the synthetic sample count (" +
                  std::to_string(synthetic_count) + ")");
  return out;
}

struct FeatureVector {
  std::vector<double> values;

  FeatureVector() = default;
  explicit FeatureVector(std::vector<double> v) : values(std::move(v)) {
    for (double x : values)
      if (!(x >= 0.0)) throw ParameterError("feature values must be nonnegative");
  }

  std::size_t size() const noexcept { return values.size(); }
  double mean() const noexcept {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
};

inline int histogram_bin(float v, int bins) noexcept {
  const int b = static_cast<int>(v * static_cast<float>(bins));
  return std::clamp(b, 0, bins - 1);
}

/// Per-channel intensity histogram, channels concatenated (N = bins * channels).
inline FeatureVector featurize(const Image& image, int bins) {
  if (bins < 2) throw ConfigError("histogram needs at least 2 bins, got " + std::to_string(bins));
  if (image.empty()) throw ParameterError("cannot featurize an empty image");
  const int c = image.channels();
  std::vector<double> h(static_cast<std::size_t>(bins) * static_cast<std::size_t>(c), 0.0);
  const auto px = image.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const auto ch = static_cast<std::size_t>(i % static_cast<std::size_t>(c));
    h[ch * static_cast<std::size_t>(bins) + static_cast<std::size_t>(histogram_bin(px[i], bins))] += 1.0;
  }
  FeatureVector f;
  f.values = std::move(h);
  return f;
}

/// Bilinear sample with edge-pixel padding.
inline float sample_bilinear(const Image& img, double x, double y, int c) noexcept {
  const int w = img.width();
  const int h = img.height();
  x = std::clamp(x, 0.0, static_cast<double>(w - 1));
  y = std::clamp(y, 0.0, static_cast<double>(h - 1));
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const int x1 = std::min(x0 + 1, w - 1);
  const int y1 = std::min(y0 + 1, h - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
  const double bot = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
  return static_cast<float>(std::clamp((1.0 - fy) * top + fy * bot, 0.0, 1.0));
}

// Resizes to width x height. Downscaling averages source boxes so large crops
// do not alias; upscaling is bilinear. Same-size input is returned unchanged.
inline Image resize(const Image& src, int width, int height) {
  if (src.width() == width && src.height() == height) return src;
  Image out(width, height, src.channels());
  const double sx = static_cast<double>(src.width()) / width;
  const double sy = static_cast<double>(src.height()) / height;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      for (int c = 0; c < src.channels(); ++c) {
        if (sx <= 1.0 && sy <= 1.0) {
          out.at(x, y, c) = sample_bilinear(src, (x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5, c);
          continue;
        }
        const int x0 = static_cast<int>(std::floor(x * sx));
        const int y0 = static_cast<int>(std::floor(y * sy));
        const int x1 = std::max(x0 + 1, std::min(src.width(), static_cast<int>(std::ceil((x + 1) * sx))));
        const int y1 = std::max(y0 + 1, std::min(src.height(), static_cast<int>(std::ceil((y + 1) * sy))));
        double acc = 0.0;
        for (int yy = y0; yy < y1; ++yy)
          for (int xx = x0; xx < x1; ++xx) acc += src.at(xx, yy, c);
        out.at(x, y, c) = static_cast<float>(std::clamp(acc / ((x1 - x0) * (y1 - y0)), 0.0, 1.0));
      }
    }
  }
  return out;
}

// Inclusive rectangle (x1,y1)-(x2,y2).
inline Image crop(const Image& src, int x1, int y1, int x2, int y2) {
  if (x1 < 0 || y1 < 0 || x2 >= src.width() || y2 >= src.height() || x1 >= x2 || y1 >= y2)
    throw ParameterError("crop rectangle outside image bounds");
  Image out(x2 - x1 + 1, y2 - y1 + 1, src.channels());
  for (int y = y1; y <= y2; ++y)
    for (int x = x1; x <= x2; ++x)
      for (int c = 0; c < src.channels(); ++c) out.at(x - x1, y - y1, c) = src.at(x, y, c);
  return out;
}

inline Image to_channels(const Image& src, int channels) {
  if (src.channels() == channels) return src;
  Image out(src.width(), src.height(), channels);
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) {
      if (channels == 1) {
        out.at(x, y) = (src.at(x, y, 0) + src.at(x, y, 1) + src.at(x, y, 2)) / 3.0f;
      } else {
        for (int c = 0; c < 3; ++c) out.at(x, y, c) = src.at(x, y, 0);
      }
    }
  return out;
}

/// Stratified, seeded partition. Per-class holdout counts follow a
/// largest-remainder allocation of round(n * fraction), kept in [1, n_k - 1].
inline std::pair<SyntheticDataset, SyntheticDataset> split_dataset(const SyntheticDataset& d,
                                                                   double holdout_fraction,
                                                                   std::uint64_t seed) {
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0))
    throw ConfigError("holdout fraction must lie in (0,1)");
  const auto k = static_cast<std::size_t>(d.classes);
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    by_class.at(static_cast<std::size_t>(d.samples[i].label)).push_back(i);
  for (std::size_t c = 0; c < k; ++c)
    if (by_class[c].size() < 2)
      throw DataError("class " + std::to_string(c) + " has fewer than 2 samples; cannot split");

  const double total = static_cast<double>(d.samples.size()) * holdout_fraction;
  const auto target = static_cast<std::size_t>(std::llround(total));
  std::vector<std::size_t> take(k);
  std::vector<std::pair<double, std::size_t>> rema;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < k; ++c) {
    const double exact = static_cast<double>(by_class[c].size()) * holdout_fraction;
    take[c] = static_cast<std::size_t>(std::floor(exact));
    assigned += take[c];
    rema.emplace_back(exact - std::floor(exact), c);
  }
  std::stable_sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < rema.size() && assigned < target; ++i, ++assigned) ++take[rema[i].second];
  for (std::size_t c = 0; c < k; ++c) take[c] = std::clamp<std::size_t>(take[c], 1, by_class[c].size() - 1);

  std::vector<bool> held(d.samples.size(), false);
  for (std::size_t c = 0; c < k; ++c) {
    auto idx = by_class[c];
    Rng rng = make_rng(seed, {c});
    std::shuffle(idx.begin(), idx.end(), rng);
    for (std::size_t i = 0; i < take[c]; ++i) held[idx[i]] = true;
  }

  SyntheticDataset train{{}, d.classes, d.provenance};
  SyntheticDataset hold{{}, d.classes, d.provenance};
  for (std::size_t i = 0; i < d.samples.size(); ++i)
    (held[i] ? hold : train).samples.push_back(d.samples[i]);
  return {std::move(train), std::move(hold)};
}

}  // namespace gol
