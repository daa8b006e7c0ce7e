#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gol/core.hpp"
#include "gol/error.hpp"
#include "gol/random.hpp"

namespace gol {

struct LayerSpec {
  enum class Kind { Conv, Pool, Dense };
  Kind kind = Kind::Dense;
  int kernel = 0;  // conv kernel side or pool window
  int size = 0;    // conv filters or dense width

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

/// Hidden layer list plus input shape and class count. The softmax output
/// layer (dense, K wide) is implicit. Text form: "conv5x5x8,pool2,fc64".
struct Architecture {
  int channels = 1;
  int height = 32;
  int width = 32;
  int classes = 2;
  std::vector<LayerSpec> hidden;

  static constexpr std::string_view kDefault = "conv5x5x8,pool2,conv5x5x16,pool2,fc64";

  static Architecture parse(std::string_view text, int channels, int height, int width, int classes) {
    Architecture a{channels, height, width, classes, {}};
    auto bad = [&](std::string_view tok) {
      return ConfigError("bad layer '" + std::string(tok) + "' in architecture '" + std::string(text) + "'");
    };
    auto to_int = [&](std::string_view s, std::string_view tok) {
      int v = 0;
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || v <= 0) throw bad(tok);
      return v;
    };
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
      const std::size_t end = std::min(text.find(',', pos), text.size());
      const std::string_view tok = text.substr(pos, end - pos);
      if (tok.starts_with("conv")) {
        const auto rest = tok.substr(4);
        const auto x1 = rest.find('x');
        const auto x2 = rest.find('x', x1 == std::string_view::npos ? x1 : x1 + 1);
        if (x1 == std::string_view::npos || x2 == std::string_view::npos) throw bad(tok);
        const int k1 = to_int(rest.substr(0, x1), tok);
        const int k2 = to_int(rest.substr(x1 + 1, x2 - x1 - 1), tok);
        if (k1 != k2) throw bad(tok);
        a.hidden.push_back({LayerSpec::Kind::Conv, k1, to_int(rest.substr(x2 + 1), tok)});
      } else if (tok.starts_with("pool")) {
        a.hidden.push_back({LayerSpec::Kind::Pool, to_int(tok.substr(4), tok), 0});
      } else if (tok.starts_with("fc")) {
        a.hidden.push_back({LayerSpec::Kind::Dense, 0, to_int(tok.substr(2), tok)});
      } else {
        throw bad(tok);
      }
      pos = end + 1;
    }
    a.validate();
    return a;
  }

  static Architecture default_for(int channels, int height, int width, int classes) {
    return parse(kDefault, channels, height, width, classes);
  }

  std::string describe() const {
    std::string out;
    for (const auto& l : hidden) {
      if (!out.empty()) out += ',';
      switch (l.kind) {
        case LayerSpec::Kind::Conv:
          out += "conv" + std::to_string(l.kernel) + "x" + std::to_string(l.kernel) + "x" + std::to_string(l.size);
          break;
        case LayerSpec::Kind::Pool:
          out += "pool" + std::to_string(l.kernel);
          break;
        case LayerSpec::Kind::Dense:
          out += "fc" + std::to_string(l.size);
          break;
      }
    }
    return out;
  }

  void validate() const {
    if (channels <= 0 || height <= 0 || width <= 0) throw ConfigError("architecture input shape must be positive");
    if (classes < 2) throw ConfigError("architecture needs at least 2 classes");
    int c = channels, h = height, w = width;
    bool flat = false;
    for (const auto& l : hidden) {
      if (l.kind == LayerSpec::Kind::Dense) {
        flat = true;
        continue;
      }
      if (flat) throw ConfigError("spatial layer after a fully-connected layer");
      if (l.kind == LayerSpec::Kind::Conv) {
        h = h - l.kernel + 1;
        w = w - l.kernel + 1;
        c = l.size;
      } else {
        h /= l.kernel;
        w /= l.kernel;
      }
      if (h <= 0 || w <= 0) throw ConfigError("architecture shrinks the " + std::to_string(height) + "x" +
                                              std::to_string(width) + " input to nothing");
    }
    (void)c;
  }

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct TrainConfig {
  int epochs = 300;
  double learning_rate = 0.01;
  double momentum = 0.9;
  int batch_size = 32;
  double holdout_fraction = 0.2;
  std::uint64_t seed = 0;

  void validate() const {
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("batch size must be >= 1");
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0,1)");
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw ConfigError("holdout fraction must lie in (0,1)");
  }
};

/// Feed-forward convolutional network with a softmax head. All parameters
/// live in one flat vector; layers address it through offsets.
template <typename T>
class BasicClassifier {
public:
  enum class OpKind { Conv, Relu, Pool, Dense };

  struct Op {
    OpKind kind;
    int in_c, in_h, in_w;
    int out_c, out_h, out_w;
    int k = 0;
    std::size_t w_off = 0, n_w = 0, b_off = 0, n_b = 0;
    std::size_t in_size() const { return static_cast<std::size_t>(in_c) * in_h * in_w; }
    std::size_t out_size() const { return static_cast<std::size_t>(out_c) * out_h * out_w; }
  };

  // Activations and pooling switches for one sample.
  struct Workspace {
    std::vector<std::vector<T>> acts;
    std::vector<std::vector<std::uint32_t>> argmax;
    std::vector<std::vector<T>> grads;
    std::vector<std::vector<T>> cols;  // im2col patches per conv op
    std::vector<T> dcols;
  };

  BasicClassifier() = default;

  explicit BasicClassifier(Architecture arch) : arch_(std::move(arch)) {
    arch_.validate();
    build_ops();
  }

  const Architecture& architecture() const noexcept { return arch_; }
  int classes() const noexcept { return arch_.classes; }
  std::size_t input_size() const noexcept {
    return static_cast<std::size_t>(arch_.channels) * arch_.height * arch_.width;
  }
  std::span<const Op> ops() const noexcept { return ops_; }

  std::span<const T> params() const noexcept { return params_; }
  std::span<T> params() noexcept { return params_; }
  std::size_t param_count() const noexcept { return params_.size(); }

  bool trained() const noexcept { return trained_; }
  void mark_trained(bool v = true) noexcept { trained_ = v; }

  // Weights uniform in +-sqrt(6 / fan_in), biases zero.
  void initialize(std::uint64_t seed) {
    Rng rng = make_rng(seed, {0x1417});
    for (const auto& op : ops_) {
      if (op.n_w == 0) continue;
      const double fan_in = static_cast<double>(op.n_w) / static_cast<double>(op.n_b);
      std::uniform_real_distribution<double> u(-std::sqrt(6.0 / fan_in), std::sqrt(6.0 / fan_in));
      for (std::size_t i = 0; i < op.n_w; ++i) params_[op.w_off + i] = static_cast<T>(u(rng));
      for (std::size_t i = 0; i < op.n_b; ++i) params_[op.b_off + i] = T(0);
    }
  }

  // Network input: CHW layout, intensities shifted to [-0.5, 0.5].
  void encode(const Image& img, std::span<T> out) const {
    if (img.channels() != arch_.channels || img.height() != arch_.height || img.width() != arch_.width)
      throw DataError("image shape " + std::to_string(img.width()) + "x" + std::to_string(img.height()) + "x" +
                      std::to_string(img.channels()) + " does not match classifier input " +
                      std::to_string(arch_.width) + "x" + std::to_string(arch_.height) + "x" +
                      std::to_string(arch_.channels));
    const std::size_t plane = static_cast<std::size_t>(arch_.height) * arch_.width;
    for (int y = 0; y < arch_.height; ++y)
      for (int x = 0; x < arch_.width; ++x)
        for (int c = 0; c < arch_.channels; ++c)
          out[c * plane + static_cast<std::size_t>(y) * arch_.width + x] = static_cast<T>(img.at(x, y, c)) - T(0.5);
  }

  std::vector<T> encode(const Image& img) const {
    std::vector<T> v(input_size());
    encode(img, v);
    return v;
  }

  Workspace make_workspace() const {
    Workspace ws;
    ws.acts.resize(ops_.size() + 1);
    ws.grads.resize(ops_.size() + 1);
    ws.argmax.resize(ops_.size());
    ws.cols.resize(ops_.size());
    ws.acts[0].resize(input_size());
    ws.grads[0].resize(input_size());
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      ws.acts[i + 1].resize(ops_[i].out_size());
      ws.grads[i + 1].resize(ops_[i].out_size());
      if (ops_[i].kind == OpKind::Pool) ws.argmax[i].resize(ops_[i].out_size());
      if (ops_[i].kind == OpKind::Conv) {
        const auto& op = ops_[i];
        ws.cols[i].resize(static_cast<std::size_t>(op.in_c) * op.k * op.k * op.out_h * op.out_w);
        ws.dcols.resize(std::max(ws.dcols.size(), ws.cols[i].size()));
      }
    }
    return ws;
  }

  // Runs ops [first_op, end) reading ws.acts[first_op]; returns the logits.
  std::span<const T> forward(Workspace& ws, std::size_t first_op = 0) const {
    for (std::size_t i = first_op; i < ops_.size(); ++i) forward_op(i, ws);
    return ws.acts.back();
  }

  // Softmax in double precision.
  static std::vector<double> softmax(std::span<const T> logits) {
    std::vector<double> p(logits.size());
    double mx = -std::numeric_limits<double>::infinity();
    for (T v : logits) mx = std::max(mx, static_cast<double>(v));
    double z = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) z += p[i] = std::exp(static_cast<double>(logits[i]) - mx);
    for (double& v : p) v /= z;
    return p;
  }

  static double cross_entropy(std::span<const T> logits, int label) {
    double mx = -std::numeric_limits<double>::infinity();
    for (T v : logits) mx = std::max(mx, static_cast<double>(v));
    double z = 0.0;
    for (T v : logits) z += std::exp(static_cast<double>(v) - mx);
    return std::log(z) + mx - static_cast<double>(logits[static_cast<std::size_t>(label)]);
  }

  std::vector<double> predict_proba(const Image& img) const {
    require_trained();
    auto ws = make_workspace();
    encode(img, ws.acts[0]);
    return softmax(forward(ws));
  }

  // Lowest class index wins ties.
  int predict(const Image& img) const {
    const auto p = predict_proba(img);
    return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
  }

  /// Mean cross-entropy over the batch; `grad` receives d(loss)/d(params).
  double loss_and_gradient(std::span<const std::vector<T>> inputs, std::span<const int> labels,
                           std::vector<T>& grad) const {
    grad.assign(params_.size(), T(0));
    auto ws = make_workspace();
    double loss = 0.0;
    const T scale = T(1) / static_cast<T>(inputs.size());
    for (std::size_t s = 0; s < inputs.size(); ++s)
      loss += accumulate_sample(ws, inputs[s], labels[s], scale, grad);
    return loss / static_cast<double>(inputs.size());
  }

  // Forward + backward for one sample, adding scale * gradient into grad.
  double accumulate_sample(Workspace& ws, std::span<const T> input, int label, T scale, std::vector<T>& grad) const {
    std::copy(input.begin(), input.end(), ws.acts[0].begin());
    const auto logits = forward(ws);
    const auto p = softmax(logits);
    auto& top = ws.grads.back();
    for (std::size_t i = 0; i < p.size(); ++i)
      top[i] = static_cast<T>((p[i] - (static_cast<int>(i) == label ? 1.0 : 0.0))) * scale;
    for (std::size_t i = ops_.size(); i-- > 0;) backward_op(i, ws, grad, i > 0);
    return -std::log(std::max(p[static_cast<std::size_t>(label)], std::numeric_limits<double>::min()));
  }

  // Index of the op whose weights or biases contain parameter p.
  std::size_t owning_op(std::size_t p) const {
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      const auto& op = ops_[i];
      if (op.n_w && p >= op.w_off && p < op.w_off + op.n_w) return i;
      if (op.n_b && p >= op.b_off && p < op.b_off + op.n_b) return i;
    }
    throw ParameterError("parameter index out of range");
  }

  void require_trained() const {
    if (!trained_) throw DataError("classifier has not been trained");
  }

private:
  void build_ops() {
    ops_.clear();
    int c = arch_.channels, h = arch_.height, w = arch_.width;
    std::size_t off = 0;
    auto add_params = [&](Op& op, std::size_t nw, std::size_t nb) {
      op.w_off = off;
      op.n_w = nw;
      off += nw;
      op.b_off = off;
      op.n_b = nb;
      off += nb;
    };
    auto relu = [&]() { ops_.push_back(Op{OpKind::Relu, c, h, w, c, h, w}); };
    for (const auto& l : arch_.hidden) {
      switch (l.kind) {
        case LayerSpec::Kind::Conv: {
          Op op{OpKind::Conv, c, h, w, l.size, h - l.kernel + 1, w - l.kernel + 1, l.kernel};
          add_params(op, static_cast<std::size_t>(l.size) * c * l.kernel * l.kernel, static_cast<std::size_t>(l.size));
          ops_.push_back(op);
          c = op.out_c, h = op.out_h, w = op.out_w;
          relu();
          break;
        }
        case LayerSpec::Kind::Pool: {
          Op op{OpKind::Pool, c, h, w, c, h / l.kernel, w / l.kernel, l.kernel};
          ops_.push_back(op);
          h = op.out_h, w = op.out_w;
          break;
        }
        case LayerSpec::Kind::Dense: {
          Op op{OpKind::Dense, c, h, w, l.size, 1, 1};
          add_params(op, static_cast<std::size_t>(l.size) * c * h * w, static_cast<std::size_t>(l.size));
          ops_.push_back(op);
          c = l.size, h = 1, w = 1;
          relu();
          break;
        }
      }
    }
    Op out{OpKind::Dense, c, h, w, arch_.classes, 1, 1};
    add_params(out, static_cast<std::size_t>(arch_.classes) * c * h * w, static_cast<std::size_t>(arch_.classes));
    ops_.push_back(out);
    params_.assign(off, T(0));
  }

  // cols[(ic, ky, kx)][y * out_w + x] = in[ic][y + ky][x + kx]
  static void im2col(const Op& op, const T* in, T* cols) {
    const std::size_t ip = static_cast<std::size_t>(op.in_h) * op.in_w;
    for (int ic = 0; ic < op.in_c; ++ic)
      for (int ky = 0; ky < op.k; ++ky)
        for (int kx = 0; kx < op.k; ++kx)
          for (int y = 0; y < op.out_h; ++y) {
            const T* src = in + ic * ip + static_cast<std::size_t>(y + ky) * op.in_w + kx;
            std::copy(src, src + op.out_w, cols);
            cols += op.out_w;
          }
  }

  static void col2im(const Op& op, const T* cols, T* din) {
    const std::size_t ip = static_cast<std::size_t>(op.in_h) * op.in_w;
    std::fill(din, din + op.in_size(), T(0));
    for (int ic = 0; ic < op.in_c; ++ic)
      for (int ky = 0; ky < op.k; ++ky)
        for (int kx = 0; kx < op.k; ++kx)
          for (int y = 0; y < op.out_h; ++y) {
            T* dst = din + ic * ip + static_cast<std::size_t>(y + ky) * op.in_w + kx;
            for (int x = 0; x < op.out_w; ++x) dst[x] += cols[x];
            cols += op.out_w;
          }
  }

  void forward_op(std::size_t i, Workspace& ws) const {
    const Op& op = ops_[i];
    const T* in = ws.acts[i].data();
    T* out = ws.acts[i + 1].data();
    switch (op.kind) {
      case OpKind::Conv: {
        const T* wt = params_.data() + op.w_off;
        const T* b = params_.data() + op.b_off;
        const std::size_t opl = static_cast<std::size_t>(op.out_h) * op.out_w;
        const std::size_t rows = static_cast<std::size_t>(op.in_c) * op.k * op.k;
        T* cols = ws.cols[i].data();
        im2col(op, in, cols);
        for (int oc = 0; oc < op.out_c; ++oc) {
          T* dst = out + oc * opl;
          std::fill(dst, dst + opl, b[oc]);
          const T* wrow = wt + static_cast<std::size_t>(oc) * rows;
          for (std::size_t r = 0; r < rows; ++r) {
            const T wv = wrow[r];
            const T* src = cols + r * opl;
            for (std::size_t p = 0; p < opl; ++p) dst[p] += wv * src[p];
          }
        }
        break;
      }
      case OpKind::Relu:
        for (std::size_t j = 0; j < op.out_size(); ++j) out[j] = in[j] > T(0) ? in[j] : T(0);
        break;
      case OpKind::Pool: {
        auto& am = ws.argmax[i];
        for (int c = 0; c < op.out_c; ++c)
          for (int y = 0; y < op.out_h; ++y)
            for (int x = 0; x < op.out_w; ++x) {
              std::uint32_t best = 0;
              T bv = -std::numeric_limits<T>::infinity();
              for (int dy = 0; dy < op.k; ++dy)
                for (int dx = 0; dx < op.k; ++dx) {
                  const auto idx = static_cast<std::uint32_t>((c * op.in_h + y * op.k + dy) * op.in_w + x * op.k + dx);
                  if (in[idx] > bv) bv = in[idx], best = idx;
                }
              const std::size_t o = (static_cast<std::size_t>(c) * op.out_h + y) * op.out_w + x;
              out[o] = bv;
              am[o] = best;
            }
        break;
      }
      case OpKind::Dense: {
        const T* wt = params_.data() + op.w_off;
        const T* b = params_.data() + op.b_off;
        const std::size_t n = op.in_size();
        for (int o = 0; o < op.out_c; ++o) {
          const T* row = wt + static_cast<std::size_t>(o) * n;
          T acc = b[o];
#pragma omp simd reduction(+ : acc)
          for (std::size_t j = 0; j < n; ++j) acc += row[j] * in[j];
          out[o] = acc;
        }
        break;
      }
    }
  }

  void backward_op(std::size_t i, Workspace& ws, std::vector<T>& grad, bool need_input_grad) const {
    const Op& op = ops_[i];
    const T* in = ws.acts[i].data();
    const T* out = ws.acts[i + 1].data();
    const T* dout = ws.grads[i + 1].data();
    T* din = ws.grads[i].data();
    switch (op.kind) {
      case OpKind::Conv: {
        const T* wt = params_.data() + op.w_off;
        T* gw = grad.data() + op.w_off;
        T* gb = grad.data() + op.b_off;
        const std::size_t opl = static_cast<std::size_t>(op.out_h) * op.out_w;
        const std::size_t rows = static_cast<std::size_t>(op.in_c) * op.k * op.k;
        const T* cols = ws.cols[i].data();
        T* dcols = ws.dcols.data();
        if (need_input_grad) std::fill(dcols, dcols + rows * opl, T(0));
        for (int oc = 0; oc < op.out_c; ++oc) {
          const T* g = dout + oc * opl;
          T sb = 0;
#pragma omp simd reduction(+ : sb)
          for (std::size_t p = 0; p < opl; ++p) sb += g[p];
          gb[oc] += sb;
          const T* wrow = wt + static_cast<std::size_t>(oc) * rows;
          T* gwrow = gw + static_cast<std::size_t>(oc) * rows;
          for (std::size_t r = 0; r < rows; ++r) {
            const T* src = cols + r * opl;
            T acc = 0;
#pragma omp simd reduction(+ : acc)
            for (std::size_t p = 0; p < opl; ++p) acc += g[p] * src[p];
            gwrow[r] += acc;
            if (need_input_grad) {
              const T wv = wrow[r];
              T* dc = dcols + r * opl;
              for (std::size_t p = 0; p < opl; ++p) dc[p] += wv * g[p];
            }
          }
        }
        if (need_input_grad) col2im(op, dcols, din);
        break;
      }
      case OpKind::Relu:
        for (std::size_t j = 0; j < op.out_size(); ++j) din[j] = out[j] > T(0) ? dout[j] : T(0);
        break;
      case OpKind::Pool: {
        std::fill(din, din + op.in_size(), T(0));
        const auto& am = ws.argmax[i];
        for (std::size_t j = 0; j < op.out_size(); ++j) din[am[j]] += dout[j];
        break;
      }
      case OpKind::Dense: {
        const T* wt = params_.data() + op.w_off;
        T* gw = grad.data() + op.w_off;
        T* gb = grad.data() + op.b_off;
        const std::size_t n = op.in_size();
        if (need_input_grad) std::fill(din, din + n, T(0));
        for (int o = 0; o < op.out_c; ++o) {
          const T g = dout[o];
          gb[o] += g;
          if (g == T(0)) continue;
          T* grow = gw + static_cast<std::size_t>(o) * n;
          for (std::size_t j = 0; j < n; ++j) grow[j] += g * in[j];
          if (need_input_grad) {
            const T* row = wt + static_cast<std::size_t>(o) * n;
            for (std::size_t j = 0; j < n; ++j) din[j] += g * row[j];
          }
        }
        break;
      }
    }
  }

  Architecture arch_;
  std::vector<Op> ops_;
  std::vector<T> params_;
  bool trained_ = false;
};

using Classifier = BasicClassifier<float>;

/// Mini-batch SGD with momentum on cross-entropy. `loss_history`, when
/// given, receives the mean training loss of every epoch.
template <typename T = float>
BasicClassifier<T> train(const Architecture& arch, const SyntheticDataset& dataset, const TrainConfig& cfg,
                         std::vector<double>* loss_history = nullptr) {
  cfg.validate();
  if (dataset.classes != arch.classes)
    throw DataError("dataset has " + std::to_string(dataset.classes) + " classes, architecture expects " +
                    std::to_string(arch.classes));
  dataset.require_coverage();

  BasicClassifier<T> net(arch);
  net.initialize(cfg.seed);
  const std::size_t n = dataset.size();
  const std::size_t in = net.input_size();
  std::vector<T> inputs(n * in);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    net.encode(dataset.samples[i].image, std::span<T>(inputs).subspan(i * in, in));
    labels[i] = dataset.samples[i].label;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<T> grad(net.param_count()), velocity(net.param_count(), T(0));
  auto ws = net.make_workspace();
  Rng rng = make_rng(cfg.seed, {0x5eed});
  const auto lr = static_cast<T>(cfg.learning_rate);
  const auto mom = static_cast<T>(cfg.momentum);
  auto params = net.params();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(n, start + static_cast<std::size_t>(cfg.batch_size));
      std::fill(grad.begin(), grad.end(), T(0));
      const T scale = T(1) / static_cast<T>(end - start);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t s = order[b];
        epoch_loss += net.accumulate_sample(ws, std::span<const T>(inputs).subspan(s * in, in), labels[s], scale, grad);
      }
      for (std::size_t p = 0; p < grad.size(); ++p) {
        velocity[p] = mom * velocity[p] - lr * grad[p];
        params[p] += velocity[p];
      }
    }
    if (loss_history) loss_history->push_back(epoch_loss / static_cast<double>(n));
  }
  net.mark_trained();
  return net;
}

/// Fraction of samples whose argmax prediction equals the label.
template <typename T>
double accuracy(const BasicClassifier<T>& c, std::span<const LabeledSample> samples) {
  c.require_trained();
  if (samples.empty()) throw DataError("accuracy needs a non-empty evaluation set");
  std::size_t hits = 0;
  for (const auto& s : samples) hits += c.predict(s.image) == s.label ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(samples.size());
}

template <typename T>
double accuracy(const BasicClassifier<T>& c, const SyntheticDataset& eval_set) {
  return accuracy(c, std::span<const LabeledSample>(eval_set.samples));
}

}  // namespace gol
