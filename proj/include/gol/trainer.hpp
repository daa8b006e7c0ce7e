#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <iterator>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gol/classifier.hpp"
#include "gol/core.hpp"
#include "gol/energy.hpp"
#include "gol/error.hpp"
#include "gol/format.hpp"
#include "gol/generator.hpp"
#include "gol/pareto.hpp"
#include "gol/random.hpp"

namespace gol {

enum class OptimizerMode { VarianceSearch, Evolutionary, Scalarized };

struct GolConfig {
  int episodes = 30;
  int candidates = 16;
  std::size_t samples = 500;
  EnergyMode energy;
  GeneratorParams mean = GeneratorParams::identity();
  VarianceSchedule schedule = VarianceSchedule::proportional(0.05, 0.03, GeneratorParams::default_bounds());
  std::string arch{Architecture::kDefault};
  TrainConfig train;        // per-candidate base classifier
  TrainConfig final_train;  // Pareto-optimal classifier on the pooled front data
  OptimizerMode mode = OptimizerMode::VarianceSearch;
  ScalarizationWeights lambda;
  std::uint64_t seed = 0;
  int threads = 1;
  // Upper bound on the pooled regeneration size; 0 keeps m samples per front member.
  std::size_t final_pool_cap = 0;

  void validate(int classes) const {
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (candidates < 1) throw ConfigError("candidates must be >= 1");
    if (samples < static_cast<std::size_t>(classes))
      throw ConfigError("samples (" + std::to_string(samples) + ") must be >= class count (" +
                        std::to_string(classes) + ")");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    energy.validate();
    mean.validate();
    schedule.validate();
    train.validate();
    final_train.validate();
    if (mode == OptimizerMode::Scalarized) {
      lambda.validate();
      if (lambda.lambda.size() != static_cast<std::size_t>(classes) + 1)
        throw ConfigError("scalarization needs K+1 = " + std::to_string(classes + 1) + " weights");
    }
  }

  // Canonical text of everything that influences results (not threads).
  std::string canonical() const {
    std::string s = "episodes=" + std::to_string(episodes) + ";candidates=" + std::to_string(candidates) +
                    ";samples=" + std::to_string(samples) + ";energy=" + std::to_string(static_cast<int>(energy.kind)) +
                    "," + format_double(energy.q) + "," + std::to_string(static_cast<int>(energy.aggregation)) + "," +
                    std::to_string(energy.bins) + ";mean=" + join_doubles(mean.theta) + ";bounds=";
    for (const auto& b : mean.bounds) s += format_double(b.lower) + ":" + format_double(b.upper) + ",";
    s += ";sigma0=" + join_doubles(schedule.sigma0) + ";delta=" + join_doubles(schedule.delta) + ";arch=" + arch;
    for (const TrainConfig* t : {&train, &final_train})
      s += ";train=" + std::to_string(t->epochs) + "," + format_double(t->learning_rate) + "," +
           format_double(t->momentum) + "," + std::to_string(t->batch_size) + "," + format_double(t->holdout_fraction);
    s += ";mode=" + std::to_string(static_cast<int>(mode)) + ";lambda=" + join_doubles(lambda.lambda) +
         ";seed=" + std::to_string(seed) + ";cap=" + std::to_string(final_pool_cap);
    return s;
  }

  std::uint64_t hash() const { return fnv1a(canonical()); }
};

struct CandidateMetrics {
  int episode = 0;
  int candidate = 0;
  ObjectiveVector z;
  double wall_seconds = 0.0;
};

/// Raised when a candidate fails; the archive is left untouched.
class EpisodeError : public Error {
public:
  EpisodeError(int episode, int candidate, const std::string& what)
      : Error("episode " + std::to_string(episode) + " aborted: candidate " + std::to_string(candidate) +
              " failed: " + what),
        episode_(episode),
        candidate_(candidate) {}
  int episode() const noexcept { return episode_; }
  int candidate() const noexcept { return candidate_; }

private:
  int episode_;
  int candidate_;
};

// Seeds for one candidate all derive from its generation stream, so a stored
// record reproduces its dataset, split, and classifier.
struct CandidateSeeds {
  std::uint64_t generation;
  std::uint64_t split() const { return derive_seed(generation, {1}); }
  std::uint64_t training() const { return derive_seed(generation, {2}); }
};

inline std::uint64_t candidate_generation_seed(std::uint64_t master, int episode, int candidate) {
  return derive_seed(master, {static_cast<std::uint64_t>(episode), static_cast<std::uint64_t>(candidate), 2});
}

inline std::uint64_t candidate_sampling_seed(std::uint64_t master, int episode, int candidate) {
  return derive_seed(master, {static_cast<std::uint64_t>(episode), static_cast<std::uint64_t>(candidate), 1});
}

struct CandidateEvaluation {
  ObjectiveVector z;
  Classifier classifier;
  SyntheticDataset holdout;
};

/// generate -> split -> train -> score for one decision vector.
inline CandidateEvaluation evaluate_candidate(const OneShotSet& s, const RegularizationSet& e, const GolConfig& cfg,
                                              const GeneratorParams& theta, std::uint64_t generation_seed) {
  const CandidateSeeds seeds{generation_seed};
  const auto data = generate(s, theta, cfg.samples, seeds.generation);
  auto [train_part, holdout] = split_dataset(data, cfg.train.holdout_fraction, seeds.split());
  const auto& first = s.templ(0);
  const auto arch = Architecture::parse(cfg.arch, first.channels(), first.height(), first.width(), s.classes());
  TrainConfig tc = cfg.train;
  tc.seed = seeds.training();
  auto net = train<float>(arch, train_part, tc);
  auto z = evaluate_objectives(data, e, net, holdout.samples, cfg.energy);
  return {std::move(z), std::move(net), std::move(holdout)};
}

/// Survivor indices into `pool`: by front rank, then crowding distance
/// descending, then insertion order.
inline std::vector<std::size_t> select_next_generation(std::span<const SolutionRecord> pool, std::size_t keep) {
  if (pool.empty()) return {};
  const auto fronts = nondominated_sort(pool);
  std::vector<std::size_t> out;
  for (const auto& f : fronts) {
    if (out.size() >= keep) break;
    std::vector<SolutionRecord> members;
    for (std::size_t i : f) members.push_back(pool[i]);
    const auto crowd = crowding_distance(members);
    std::vector<std::size_t> order(f.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return crowd[a] > crowd[b]; });
    for (std::size_t o : order) {
      if (out.size() >= keep) break;
      out.push_back(f[o]);
    }
  }
  return out;
}

/// Uniform crossover (p = 0.5 per coordinate) between two random parents
/// followed by Gaussian mutation with the episode's sigma, clamped to bounds.
inline std::vector<GeneratorParams> make_offspring(std::span<const SolutionRecord> parents, std::size_t count,
                                                   const std::vector<Bounds>& bounds, const VarianceSchedule& schedule,
                                                   int t, Rng& rng) {
  if (parents.empty()) throw DataError("offspring need at least one parent");
  std::uniform_int_distribution<std::size_t> pick(0, parents.size() - 1);
  std::bernoulli_distribution coin(0.5);
  std::vector<GeneratorParams> out;
  for (std::size_t c = 0; c < count; ++c) {
    const auto& a = parents[pick(rng)].theta;
    const auto& b = parents[pick(rng)].theta;
    GeneratorParams child{std::vector<double>(kParamCount), bounds};
    for (std::size_t i = 0; i < kParamCount; ++i) {
      double v = coin(rng) ? a[i] : b[i];
      const double sd = schedule.sigma(i, t);
      if (sd > 0.0) v += std::normal_distribution<double>(0.0, sd)(rng);
      child.theta[i] = std::clamp(v, bounds[i].lower, bounds[i].upper);
    }
    out.push_back(std::move(child));
  }
  return out;
}

struct TrainerCheckpoint {
  std::uint64_t config_hash = 0;
  int next_episode = 1;
  std::vector<std::size_t> population;  // archive indices (evolutionary mode)
  std::vector<double> mean;             // sampling mean (scalarized mode)
};

struct GolResult {
  Archive archive;
  std::vector<SolutionRecord> front;  // members whose parameters form the optimal set
  Classifier classifier;              // Pareto-optimal classifier
  std::vector<CandidateMetrics> metrics;
  SyntheticDataset final_holdout;
  double final_holdout_accuracy = 0.0;
  std::size_t final_pool_size = 0;

  std::vector<GeneratorParams> optimal_params(const std::vector<Bounds>& bounds) const {
    std::vector<GeneratorParams> out;
    for (const auto& r : front) out.push_back({r.theta, bounds});
    return out;
  }
};

/// Episode loop over a growing archive. One instance owns one run; resume by
/// constructing from a saved archive and checkpoint.
class GolTrainer {
public:
  using EpisodeCallback = std::function<void(int episode, std::span<const CandidateMetrics>)>;

  GolTrainer(OneShotSet s, RegularizationSet e, GolConfig cfg)
      : s_(std::move(s)), e_(std::move(e)), cfg_(std::move(cfg)) {
    if (s_.classes() < 2) throw DataError("need at least 2 classes");
    if (e_.classes() != s_.classes())
      throw DataError("regularization set has " + std::to_string(e_.classes()) + " classes, templates have " +
                      std::to_string(s_.classes()));
    cfg_.validate(s_.classes());
    mean_ = cfg_.mean;
  }

  GolTrainer(OneShotSet s, RegularizationSet e, GolConfig cfg, Archive archive, const TrainerCheckpoint& cp)
      : GolTrainer(std::move(s), std::move(e), std::move(cfg)) {
    if (cp.config_hash != cfg_.hash()) throw ConfigError("checkpoint was written with a different configuration");
    archive_ = std::move(archive);
    next_episode_ = cp.next_episode;
    population_ = cp.population;
    for (std::size_t i : population_)
      if (i >= archive_.size()) throw DataError("checkpoint population refers past the archive end");
    if (!cp.mean.empty()) {
      if (cp.mean.size() != kParamCount) throw DataError("checkpoint mean has the wrong length");
      mean_.theta = cp.mean;
    }
  }

  // New regularization samples apply to later episodes only; stored records keep their scores.
  void set_regularization(RegularizationSet e) {
    if (e.classes() != s_.classes()) throw DataError("regularization class count changed");
    e_ = std::move(e);
  }

  void on_episode(EpisodeCallback cb) { callback_ = std::move(cb); }

  const Archive& archive() const noexcept { return archive_; }
  const GolConfig& config() const noexcept { return cfg_; }
  const OneShotSet& one_shot() const noexcept { return s_; }
  int next_episode() const noexcept { return next_episode_; }
  std::span<const CandidateMetrics> metrics() const noexcept { return metrics_; }

  TrainerCheckpoint checkpoint() const {
    TrainerCheckpoint cp{cfg_.hash(), next_episode_, population_, {}};
    if (cfg_.mode == OptimizerMode::Scalarized) cp.mean = mean_.theta;
    return cp;
  }

  /// Samples, evaluates and appends C candidates for episode t. All C
  /// records are appended, or none if any candidate fails.
  std::vector<SolutionRecord> run_episode(int t) {
    if (t < 1 || t > cfg_.episodes) throw ParameterError("episode " + std::to_string(t) + " outside [1, T]");
    const auto thetas = propose(t);
    const std::size_t c = thetas.size();
    std::vector<std::optional<SolutionRecord>> results(c);
    std::vector<double> seconds(c, 0.0);
    std::vector<std::exception_ptr> errors(c);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
      for (std::size_t i = next++; i < c; i = next++) {
        try {
          const auto start = std::chrono::steady_clock::now();
          const auto gen_seed = candidate_generation_seed(cfg_.seed, t, static_cast<int>(i));
          auto ev = evaluate_candidate(s_, e_, cfg_, thetas[i], gen_seed);
          results[i] = SolutionRecord{thetas[i].theta, std::move(ev.z), t, static_cast<int>(i), gen_seed};
          seconds[i] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(cfg_.threads), c);
    if (nthreads <= 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    }
    for (std::size_t i = 0; i < c; ++i) {
      if (!errors[i]) continue;
      try {
        std::rethrow_exception(errors[i]);
      } catch (const std::exception& ex) {
        throw EpisodeError(t, static_cast<int>(i), ex.what());
      }
    }

    std::vector<SolutionRecord> added;
    std::vector<CandidateMetrics> episode_metrics;
    const std::size_t base = archive_.size();
    for (std::size_t i = 0; i < c; ++i) {
      added.push_back(*results[i]);
      episode_metrics.push_back({t, static_cast<int>(i), results[i]->z, seconds[i]});
    }
    archive_.append(added);
    metrics_.insert(metrics_.end(), episode_metrics.begin(), episode_metrics.end());
    after_episode(base);
    next_episode_ = t + 1;
    if (callback_) callback_(t, episode_metrics);
    return added;
  }

  // Runs the remaining episodes.
  void run() {
    for (int t = next_episode_; t <= cfg_.episodes; ++t) run_episode(t);
  }

  /// Theta*: the Pareto front of the archive, or the scalarized optimum set in
  /// scalarized mode.
  std::vector<SolutionRecord> optimal_records() const {
    if (archive_.empty()) throw DataError("archive is empty");
    if (cfg_.mode != OptimizerMode::Scalarized) return pareto_front(archive_);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& r : archive_.records()) best = std::max(best, scalarize(r.z, cfg_.lambda));
    std::vector<SolutionRecord> out;
    for (const auto& r : archive_.records())
      if (scalarize(r.z, cfg_.lambda) == best) out.push_back(r);
    return out;
  }

  /// Regenerates data for every optimal record from its stored seed, pools it,
  /// and trains the final classifier on a stratified split of the pool.
  GolResult finish() const {
    GolResult res;
    res.archive = archive_;
    res.metrics = metrics_;
    res.front = optimal_records();
    const std::size_t l = res.front.size();
    std::size_t per = cfg_.samples;
    if (cfg_.final_pool_cap > 0 && l * per > cfg_.final_pool_cap)
      per = std::max(static_cast<std::size_t>(s_.classes()), cfg_.final_pool_cap / l);
    SyntheticDataset pool;
    pool.classes = s_.classes();
    for (const auto& r : res.front) {
      auto d = generate(s_, GeneratorParams{r.theta, cfg_.mean.bounds}, per, r.seed);
      std::move(d.samples.begin(), d.samples.end(), std::back_inserter(pool.samples));
    }
    pool.provenance = {{}, cfg_.seed};
    res.final_pool_size = pool.size();
    auto [train_part, holdout] = split_dataset(pool, cfg_.final_train.holdout_fraction, derive_seed(cfg_.seed, {0xF1, 1}));
    const auto& first = s_.templ(0);
    const auto arch = Architecture::parse(cfg_.arch, first.channels(), first.height(), first.width(), s_.classes());
    TrainConfig tc = cfg_.final_train;
    tc.seed = derive_seed(cfg_.seed, {0xF1, 2});
    res.classifier = train<float>(arch, train_part, tc);
    res.final_holdout_accuracy = accuracy(res.classifier, holdout);
    res.final_holdout = std::move(holdout);
    return res;
  }

private:
  std::vector<GeneratorParams> propose(int t) {
    const auto c = static_cast<std::size_t>(cfg_.candidates);
    if (cfg_.mode == OptimizerMode::Evolutionary && !population_.empty()) {
      std::vector<SolutionRecord> parents;
      for (std::size_t i : population_) parents.push_back(archive_[i]);
      Rng rng = make_rng(cfg_.seed, {static_cast<std::uint64_t>(t), 0x0FF5});
      return make_offspring(parents, c, cfg_.mean.bounds, cfg_.schedule, t, rng);
    }
    std::vector<GeneratorParams> out;
    for (std::size_t i = 0; i < c; ++i) {
      Rng rng{candidate_sampling_seed(cfg_.seed, t, static_cast<int>(i))};
      out.push_back(sample_params(mean_, cfg_.schedule, t, rng));
    }
    return out;
  }

  void after_episode(std::size_t first_new) {
    if (cfg_.mode == OptimizerMode::Evolutionary) {
      std::vector<std::size_t> pool_idx = population_;
      for (std::size_t i = first_new; i < archive_.size(); ++i) pool_idx.push_back(i);
      std::vector<SolutionRecord> pool;
      for (std::size_t i : pool_idx) pool.push_back(archive_[i]);
      const auto keep = select_next_generation(pool, static_cast<std::size_t>(cfg_.candidates));
      population_.clear();
      for (std::size_t k : keep) population_.push_back(pool_idx[k]);
    } else if (cfg_.mode == OptimizerMode::Scalarized) {
      const auto best = optimal_records();
      mean_.theta = best.front().theta;
    }
  }

  OneShotSet s_;
  RegularizationSet e_;
  GolConfig cfg_;
  GeneratorParams mean_;
  Archive archive_;
  std::vector<CandidateMetrics> metrics_;
  std::vector<std::size_t> population_;
  int next_episode_ = 1;
  EpisodeCallback callback_;
};

/// Runs all episodes and builds the Pareto-optimal classifier.
inline GolResult train_gol(const OneShotSet& s, const RegularizationSet& e, const GolConfig& cfg) {
  GolTrainer trainer(s, e, cfg);
  trainer.run();
  return trainer.finish();
}

}  // namespace gol
