#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "gol/config.hpp"
#include "gol/trainer.hpp"
#include "pareto_oracles.hpp"
#include "test_util.hpp"

using namespace gol;
using namespace gol::test;

namespace {

GolConfig small_config(int episodes, int candidates) {
  GolConfig cfg;
  cfg.episodes = episodes;
  cfg.candidates = candidates;
  cfg.samples = 30;
  cfg.arch = "fc8";
  cfg.train.epochs = 3;
  cfg.train.batch_size = 8;
  cfg.final_train = cfg.train;
  cfg.seed = 11;
  return cfg;
}

struct Fixture {
  OneShotSet s = bar_templates(3);
  RegularizationSet e = regularization_from(s, 3, 5);
};

SolutionRecord record(std::vector<double> z, int candidate) {
  SolutionRecord r;
  r.z.accuracy = z.back();
  z.pop_back();
  r.z.energies = std::move(z);
  r.candidate = candidate;
  return r;
}

bool within(const std::vector<double>& theta, const std::vector<Bounds>& b) {
  for (std::size_t i = 0; i < theta.size(); ++i)
    if (theta[i] < b[i].lower || theta[i] > b[i].upper) return false;
  return true;
}

// Selection by the definition: oracle ranks, crowding inside each front,
// then insertion order.
std::vector<std::size_t> select_oracle(const std::vector<SolutionRecord>& pool, std::size_t keep) {
  Matrix z;
  for (const auto& r : pool) z.push_back(r.z.values());
  const auto rank = peeling_ranks(z);
  std::vector<double> crowd(pool.size());
  const std::size_t levels = *std::max_element(rank.begin(), rank.end()) + 1;
  for (std::size_t lv = 0; lv < levels; ++lv) {
    std::vector<std::size_t> members;
    Matrix fz;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (rank[i] == lv) {
        members.push_back(i);
        fz.push_back(z[i]);
      }
    const auto d = crowding_distance(fz);
    for (std::size_t k = 0; k < members.size(); ++k) crowd[members[k]] = d[k];
  }
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (rank[a] != rank[b]) return rank[a] < rank[b];
    if (crowd[a] != crowd[b]) return crowd[a] > crowd[b];
    return a < b;
  });
  idx.resize(std::min(keep, idx.size()));
  return idx;
}

}  // namespace

TEST(Trainer, SingleEpisodeSingleCandidate) {
  Fixture f;
  auto cfg = small_config(1, 1);
  const auto res = train_gol(f.s, f.e, cfg);
  ASSERT_EQ(res.archive.size(), 1u);
  ASSERT_EQ(res.front.size(), 1u);
  EXPECT_EQ(res.front[0], res.archive[0]);
  EXPECT_TRUE(res.classifier.trained());
  EXPECT_EQ(res.final_pool_size, cfg.samples);
}

TEST(Trainer, ArchiveGrowsByCandidatesPerEpisode) {
  Fixture f;
  GolTrainer tr(f.s, f.e, small_config(3, 4));
  std::vector<int> seen;
  tr.on_episode([&](int t, std::span<const CandidateMetrics> m) {
    seen.push_back(t);
    EXPECT_EQ(m.size(), 4u);
  });
  tr.run();
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3}));
  ASSERT_EQ(tr.archive().size(), 12u);
  EXPECT_EQ(tr.metrics().size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) {
    const auto& r = tr.archive()[i];
    EXPECT_EQ(r.episode, static_cast<int>(i / 4) + 1);
    EXPECT_EQ(r.candidate, static_cast<int>(i % 4));
    EXPECT_EQ(r.z.size(), 4u);
    EXPECT_EQ(r.seed, candidate_generation_seed(11, r.episode, r.candidate));
  }
  const auto opt = tr.optimal_records();
  EXPECT_GE(opt.size(), 1u);
  EXPECT_LE(opt.size(), tr.archive().size());
}

TEST(Trainer, SeededRunsAreIdenticalAcrossThreadCounts) {
  Fixture f;
  auto cfg = small_config(2, 3);
  GolTrainer a(f.s, f.e, cfg), b(f.s, f.e, cfg);
  a.run();
  b.run();
  EXPECT_EQ(a.archive(), b.archive());
  cfg.threads = 3;
  GolTrainer c(f.s, f.e, cfg);
  c.run();
  EXPECT_EQ(a.archive(), c.archive());
}

TEST(Trainer, FailedEpisodeLeavesArchiveUntouched) {
  Fixture f;
  auto cfg = small_config(2, 2);
  GolTrainer ok(f.s, f.e, cfg);
  ok.run_episode(1);
  cfg.arch = "conv13x13x2";  // larger than the 12x12 templates
  GolTrainer tr(f.s, f.e, cfg);
  try {
    tr.run_episode(1);
    FAIL() << "expected EpisodeError";
  } catch (const EpisodeError& ex) {
    EXPECT_EQ(ex.episode(), 1);
    EXPECT_NE(std::string(ex.what()).find("12x12"), std::string::npos) << ex.what();
  }
  EXPECT_TRUE(tr.archive().empty());
  EXPECT_EQ(tr.next_episode(), 1);
  EXPECT_THROW(ok.run_episode(3), ParameterError);
}

TEST(Trainer, ZeroVarianceCollapsesToTheMean) {
  Fixture f;
  auto cfg = small_config(2, 3);
  cfg.schedule = VarianceSchedule::zero();
  cfg.mean.theta[0] = 5.0;
  GolTrainer tr(f.s, f.e, cfg);
  tr.run();
  for (const auto& r : tr.archive().records()) EXPECT_EQ(r.theta, cfg.mean.theta);
}

TEST(Trainer, EveryModeStaysInsideBounds) {
  Fixture f;
  for (auto mode : {OptimizerMode::VarianceSearch, OptimizerMode::Evolutionary, OptimizerMode::Scalarized}) {
    auto cfg = small_config(3, 3);
    cfg.mode = mode;
    cfg.lambda = {{0.2, 0.2, 0.2, 1.0}};
    cfg.schedule = VarianceSchedule::proportional(2.0, 1.0, cfg.mean.bounds);
    GolTrainer tr(f.s, f.e, cfg);
    tr.run();
    for (const auto& r : tr.archive().records()) EXPECT_TRUE(within(r.theta, cfg.mean.bounds)) << mode_name(mode);
  }
}

TEST(Trainer, ResumeMatchesUninterruptedRun) {
  Fixture f;
  for (auto mode : {OptimizerMode::VarianceSearch, OptimizerMode::Evolutionary, OptimizerMode::Scalarized}) {
    auto cfg = small_config(3, 3);
    cfg.mode = mode;
    cfg.lambda = {{0.0, 0.0, 0.0, 1.0}};
    GolTrainer full(f.s, f.e, cfg);
    full.run();

    GolTrainer first(f.s, f.e, cfg);
    first.run_episode(1);
    first.run_episode(2);
    GolTrainer resumed(f.s, f.e, cfg, first.archive(), first.checkpoint());
    EXPECT_EQ(resumed.next_episode(), 3);
    resumed.run();
    EXPECT_EQ(resumed.archive(), full.archive()) << mode_name(mode);
    EXPECT_EQ(resumed.checkpoint().population, full.checkpoint().population);
  }
}

TEST(Trainer, ResumeRejectsChangedConfig) {
  Fixture f;
  auto cfg = small_config(2, 2);
  GolTrainer tr(f.s, f.e, cfg);
  tr.run_episode(1);
  auto other = cfg;
  other.samples = 40;
  EXPECT_THROW(GolTrainer(f.s, f.e, other, tr.archive(), tr.checkpoint()), ConfigError);
  auto cp = tr.checkpoint();
  cp.population = {99};
  EXPECT_THROW(GolTrainer(f.s, f.e, cfg, tr.archive(), cp), DataError);
}

TEST(Trainer, ThreadCountDoesNotChangeTheHash) {
  auto a = small_config(2, 2);
  auto b = a;
  b.threads = 4;
  EXPECT_EQ(a.hash(), b.hash());
  b.seed = 12;
  EXPECT_NE(a.hash(), b.hash());
}

TEST(Trainer, ScalarizedOptimumIsTheArgmaxSet) {
  Fixture f;
  auto cfg = small_config(2, 4);
  cfg.mode = OptimizerMode::Scalarized;
  cfg.lambda = {{0.0, 0.0, 0.0, 1.0}};
  GolTrainer tr(f.s, f.e, cfg);
  tr.run();
  const auto opt = tr.optimal_records();
  double best = 0.0;
  for (const auto& r : tr.archive().records()) best = std::max(best, r.z.accuracy);
  std::size_t expected = 0;
  for (const auto& r : tr.archive().records()) expected += r.z.accuracy == best;
  ASSERT_EQ(opt.size(), expected);
  for (const auto& r : opt) EXPECT_EQ(r.z.accuracy, best);
  EXPECT_EQ(tr.checkpoint().mean, opt.front().theta);
}

TEST(Trainer, ConfigValidation) {
  Fixture f;
  auto cfg = small_config(1, 1);
  cfg.samples = 2;
  EXPECT_THROW(GolTrainer(f.s, f.e, cfg), ConfigError);
  cfg = small_config(1, 1);
  cfg.mode = OptimizerMode::Scalarized;
  cfg.lambda = {{1.0, 1.0}};
  EXPECT_THROW(GolTrainer(f.s, f.e, cfg), ConfigError);
  cfg = small_config(0, 1);
  EXPECT_THROW(GolTrainer(f.s, f.e, cfg), ConfigError);
  EXPECT_THROW(GolTrainer(f.s, regularization_from(bar_templates(2), 2, 1), small_config(1, 1)), DataError);
}

TEST(Trainer, FinalPoolRespectsCap) {
  Fixture f;
  auto cfg = small_config(2, 3);
  cfg.final_pool_cap = 40;
  GolTrainer tr(f.s, f.e, cfg);
  tr.run();
  const auto res = tr.finish();
  const std::size_t l = res.front.size();
  const std::size_t per = l * cfg.samples > 40 ? std::max<std::size_t>(3, 40 / l) : cfg.samples;
  EXPECT_EQ(res.final_pool_size, l * per);
  EXPECT_GT(res.final_holdout.size(), 0u);
}

TEST(Trainer, FrontHypervolumeNeverShrinks) {
  Fixture f;
  GolTrainer tr(f.s, f.e, small_config(4, 3));
  tr.run();
  std::vector<double> ref(4, std::numeric_limits<double>::infinity());
  for (const auto& r : tr.archive().records()) {
    const auto v = r.z.values();
    for (std::size_t i = 0; i < v.size(); ++i) ref[i] = std::min(ref[i], v[i] - 1.0);
  }
  double prev = 0.0;
  for (int t = 1; t <= 4; ++t) {
    Matrix pts;
    for (const auto& r : pareto_front(tr.archive().prefix_until(t))) pts.push_back(r.z.values());
    const double hv = hypervolume(pts, ref);
    EXPECT_GE(hv, prev);
    prev = hv;
  }
}

TEST(Selection, TotalTieKeepsInsertionPrefix) {
  std::vector<SolutionRecord> pool;
  for (int i = 0; i < 7; ++i) pool.push_back(record({0.5, 0.5, 0.5}, i));
  EXPECT_EQ(select_next_generation(pool, 4), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Selection, FirstFrontFillsBeforeLaterOnes) {
  std::vector<SolutionRecord> pool{record({0, 0}, 0), record({1, 3}, 1), record({2, 2}, 2), record({3, 1}, 3),
                                   record({1, 1}, 4)};
  auto keep = select_next_generation(pool, 3);
  std::sort(keep.begin(), keep.end());
  EXPECT_EQ(keep, (std::vector<std::size_t>{1, 2, 3}));
  // Boundary points of the first front win over its interior point.
  keep = select_next_generation(pool, 2);
  std::sort(keep.begin(), keep.end());
  EXPECT_EQ(keep, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(select_next_generation(pool, 10).size(), 5u);
}

TEST(Selection, MatchesReferenceSort) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const auto z = random_matrix(5 + t % 30, 3, rng, t % 2 ? 4 : 0);
    std::vector<SolutionRecord> pool;
    for (std::size_t i = 0; i < z.size(); ++i) pool.push_back(record(z[i], static_cast<int>(i)));
    const std::size_t keep = 1 + rng() % z.size();
    EXPECT_EQ(select_next_generation(pool, keep), select_oracle(pool, keep));
  }
}

TEST(Offspring, StaysInBoundsAndInheritsGenes) {
  const auto bounds = GeneratorParams::default_bounds();
  std::vector<SolutionRecord> parents(2);
  parents[0].theta.assign(kParamCount, 0.0);
  parents[1].theta.resize(kParamCount);
  for (std::size_t i = 0; i < kParamCount; ++i) parents[1].theta[i] = bounds[i].upper;
  Rng rng(3);
  for (const auto& child : make_offspring(parents, 50, bounds, VarianceSchedule::zero(), 1, rng))
    for (std::size_t i = 0; i < kParamCount; ++i)
      EXPECT_TRUE(child.theta[i] == parents[0].theta[i] || child.theta[i] == parents[1].theta[i]);
  for (const auto& child :
       make_offspring(parents, 50, bounds, VarianceSchedule::proportional(3.0, 1.0, bounds), 5, rng))
    EXPECT_TRUE(within(child.theta, bounds));
  EXPECT_THROW(make_offspring({}, 1, bounds, VarianceSchedule::zero(), 1, rng), DataError);
}
