#include <gtest/gtest.h>

#include <sstream>

#include "gol/cli.hpp"
#include "test_util.hpp"

using namespace gol;
using namespace gol::test;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string glyph(const char* name) { return (data_dir() / "glyphs" / name).string(); }

// A cheap two-class training invocation.
std::vector<std::string> smoke_args(const fs::path& out, const std::string& seed = "7") {
  return {"train",
          "--templates", glyph("templates2.txt"),
          "--regularization", glyph("regularization2.txt"),
          "--out", out.string(),
          "--seed", seed,
          "--episodes", "2",
          "--candidates", "2",
          "--samples", "40",
          "--set", "classifier.arch=conv5x5x4,pool2,fc8",
          "--set", "classifier.epochs=2",
          "--set", "final.epochs=2",
          "--set", "output.montage_samples=2"};
}

double eval_overall(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  double pct = 0.0;
  in >> tag >> pct;
  EXPECT_EQ(tag, "overall");
  return pct;
}

// Shared smoke run, trained once for the whole suite.
class CliTrained : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = scratch_dir("cli_trained");
    const auto r = run(smoke_args(dir_ / "a"));
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static fs::path dir_;
};
fs::path CliTrained::dir_;

}  // namespace

TEST_F(CliTrained, SmokeRunWritesEveryArtifact) {
  const auto out = dir_ / "a";
  for (const char* f : {"archive.tsv", "checkpoint.txt", "metrics.tsv", "config.txt", "objectives.csv", "model.txt",
                        "montage.png", "front.tsv", "summary.txt", "final_holdout/manifest.txt"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_EQ(io::read_archive(out / "archive.tsv").size(), 4u);
  EXPECT_EQ(io::read_checkpoint(out / "checkpoint.txt").next_episode, 3);
  EXPECT_EQ(io::read_lines(out / "metrics.tsv").size(), 5u);
}

TEST_F(CliTrained, SameSeedGivesByteIdenticalArchive) {
  const auto r = run(smoke_args(dir_ / "b"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(io::read_text(dir_ / "a" / "archive.tsv"), io::read_text(dir_ / "b" / "archive.tsv"));
  EXPECT_EQ(io::read_text(dir_ / "a" / "model.txt"), io::read_text(dir_ / "b" / "model.txt"));
}

TEST_F(CliTrained, ResumeAfterLastEpisodeOnlyRebuildsOutputs) {
  fs::copy(dir_ / "a", dir_ / "c", fs::copy_options::recursive);
  auto args = smoke_args(dir_ / "c");
  args.push_back("--resume");
  const auto r = run(args);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("resuming at episode 3"), std::string::npos) << r.err;
  EXPECT_EQ(io::read_text(dir_ / "a" / "archive.tsv"), io::read_text(dir_ / "c" / "archive.tsv"));
}

TEST_F(CliTrained, EvalOnFinalHoldoutMatchesSummary) {
  const auto out = dir_ / "a";
  const auto r = run({"eval", "--model", (out / "model.txt").string(), "--manifest",
                      (out / "final_holdout" / "manifest.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  double summary = -1.0;
  for (const auto& line : io::read_lines(out / "summary.txt"))
    if (line.starts_with("final_holdout_accuracy = ")) summary = std::stod(line.substr(25));
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')).substr(8, r.out.find('\t', 8) - 8), cli::percent(summary));
}

TEST_F(CliTrained, PerClassRowsAverageToOverall) {
  const auto out = dir_ / "a";
  const auto cats = out / "cats.txt";
  io::write_text(cats, "0 round\n1 pointy\n");
  const auto r = run({"eval", "--model", (out / "model.txt").string(), "--manifest", glyph("templates2.txt"),
                      "--categories", cats.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  double overall = 0.0, weighted = 0.0, n_total = 0.0;
  int class_rows = 0, category_rows = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t'), tab2 = line.rfind('\t');
    const double pct = std::stod(line.substr(tab + 1, tab2 - tab - 1)), n = std::stod(line.substr(tab2 + 1));
    if (line.starts_with("overall")) {
      overall = pct;
      n_total = n;
    } else if (line.starts_with("class")) {
      weighted += pct * n;
      ++class_rows;
    } else if (line.starts_with("category")) {
      ++category_rows;
    }
  }
  EXPECT_EQ(class_rows, 2);
  EXPECT_EQ(category_rows, 2);
  EXPECT_NEAR(weighted / n_total, overall, 0.01);
}

TEST_F(CliTrained, FrontReplayReproducesTrainingData) {
  const auto out = dir_ / "a";
  const auto archive = io::read_archive(out / "archive.tsv");
  const auto front = pareto_front(archive);
  const auto dest = dir_ / "replay";
  const auto r = run({"generate", "--templates", glyph("templates2.txt"), "--theta", "front:0", "--archive",
                      (out / "archive.tsv").string(), "--count", "40", "--dest", dest.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = io::load_one_shot(glyph("templates2.txt"), {32, 32, 1});
  const auto d = generate(s, GeneratorParams{front[0].theta, GeneratorParams::default_bounds()}, 40, front[0].seed);
  const auto got = io::load_samples(io::read_manifest(dest / "manifest.txt"), {32, 32, 1});
  ASSERT_EQ(got.size(), d.size());
  // export_dataset groups by class; compare per class in generation order.
  std::vector<std::vector<Image>> want(2), have(2);
  for (const auto& x : d.samples) want[static_cast<std::size_t>(x.label)].push_back(x.image);
  for (const auto& x : got) have[static_cast<std::size_t>(x.label)].push_back(x.image);
  EXPECT_EQ(have, want);

  const auto bad = run({"generate", "--templates", glyph("templates2.txt"), "--theta", "front:999", "--archive",
                        (out / "archive.tsv").string(), "--dest", (dir_ / "none").string()});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("out of range"), std::string::npos);
}

TEST_F(CliTrained, FrontCommandListsFrontAndExportsCsv) {
  const auto out = dir_ / "a";
  const auto r = run({"front", "--archive", (out / "archive.tsv").string(), "--csv", (dir_ / "o.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto front = pareto_front(io::read_archive(out / "archive.tsv"));
  EXPECT_EQ(static_cast<std::size_t>(std::count(r.out.begin(), r.out.end(), '\n')), front.size() + 1);
  EXPECT_EQ(io::read_objective_csv(dir_ / "o.csv").size(), 4u);
}

TEST_F(CliTrained, EvalRejectsClassMismatch) {
  const auto r = run({"eval", "--model", (dir_ / "a" / "model.txt").string(), "--manifest", glyph("heldout.txt")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("classes"), std::string::npos);
}

TEST(Cli, IdentityGenerateCopiesTemplates) {
  const auto dir = scratch_dir("cli_identity");
  const auto r = run({"generate", "--templates", glyph("templates.txt"), "--theta", "identity", "--count", "50",
                      "--dest", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto s = io::load_one_shot(glyph("templates.txt"), {32, 32, 1});
  const auto got = io::load_samples(io::read_manifest(dir / "manifest.txt"), {32, 32, 1});
  ASSERT_EQ(got.size(), 50u);
  std::vector<int> per(5, 0);
  for (const auto& x : got) {
    ++per[static_cast<std::size_t>(x.label)];
    EXPECT_EQ(x.image, s.templ(x.label));
  }
  EXPECT_EQ(per, std::vector<int>(5, 10));
}

TEST(Cli, ThetaFileSource) {
  const auto dir = scratch_dir("cli_theta_file");
  std::string theta = "10";
  for (std::size_t i = 1; i < kParamCount; ++i) theta += ",0";
  io::write_text(dir / "theta.txt", theta + "\n");
  const auto r = run({"generate", "--templates", glyph("templates2.txt"), "--theta", "file:" + (dir / "theta.txt").string(),
                      "--count", "4", "--dest", (dir / "g").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  io::write_text(dir / "short.txt", "1,2\n");
  EXPECT_EQ(run({"generate", "--templates", glyph("templates2.txt"), "--theta", "file:" + (dir / "short.txt").string(),
                 "--dest", (dir / "g2").string()})
                .code,
            2);
}

TEST(Cli, PerfectToyModelScoresHundred) {
  const auto dir = scratch_dir("cli_toy");
  // Two 2x2 classes: bright left column or bright right column.
  Classifier c(Architecture::parse("", 1, 2, 2, 2));
  const auto& op = c.ops()[0];
  auto p = c.params();
  const float w[2][4] = {{1, -1, 1, -1}, {-1, 1, -1, 1}};
  for (int o = 0; o < 2; ++o)
    for (int i = 0; i < 4; ++i) p[op.w_off + o * 4 + i] = w[o][i];
  for (std::size_t b = 0; b < op.n_b; ++b) p[op.b_off + b] = 0.0f;
  io::save_model(c, dir / "toy.txt");
  std::vector<LabeledSample> samples{{Image(2, 2, 1, {1, 0, 1, 0}), 0},
                                     {Image(2, 2, 1, {0.9f, 0.2f, 0.8f, 0.1f}), 0},
                                     {Image(2, 2, 1, {0, 1, 0, 1}), 1}};
  io::export_dataset(samples, dir / "set");
  const auto r = run({"eval", "--model", (dir / "toy.txt").string(), "--manifest", (dir / "set" / "manifest.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "overall\t100.00\t3\nclass 0\t100.00\t2\nclass 1\t100.00\t1\n");
  EXPECT_DOUBLE_EQ(eval_overall(r.out), 100.0);
}

TEST(Cli, UsageErrorsExitTwo) {
  const auto dir = scratch_dir("cli_errors");
  auto missing = run({"train", "--templates", (dir / "nowhere.txt").string(), "--regularization",
                      glyph("regularization2.txt"), "--out", (dir / "o").string()});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("nowhere.txt"), std::string::npos) << missing.err;

  auto unknown = run({"train", "--templates", glyph("templates2.txt"), "--regularization", glyph("regularization2.txt"),
                      "--set", "trainer.bogus=1"});
  EXPECT_EQ(unknown.code, 2);
  EXPECT_NE(unknown.err.find("trainer.bogus"), std::string::npos) << unknown.err;

  EXPECT_EQ(run({"train", "--set", "trainer.episodes=0", "--templates", glyph("templates2.txt"), "--regularization",
                 glyph("regularization2.txt"), "--out", (dir / "o").string()})
                .code,
            2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"train", "--seed", "abc"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"front", "--archive", (dir / "none.tsv").string()}).code, 2);
}

TEST(Cli, ConfigFileRoundTripsThroughFormat) {
  const auto dir = scratch_dir("cli_config");
  io::write_text(dir / "run.cfg",
                 "# sample run\n"
                 "trainer.episodes = 4\n"
                 "trainer.mode = evolutionary\n"
                 "energy.mode = qnorm\n"
                 "energy.q = 1.5\n"
                 "generator.sigma0.rotation = 3\n"
                 "generator.bounds.blur = 0,1.5\n"
                 "classifier.epochs = 7\n"
                 "paths.templates = t.txt\n");
  ConfigValues raw;
  raw.merge_file(dir / "run.cfg");
  const auto c = build_config(raw);
  EXPECT_EQ(c.gol.episodes, 4);
  EXPECT_EQ(c.gol.mode, OptimizerMode::Evolutionary);
  EXPECT_EQ(c.gol.energy.q, 1.5);
  EXPECT_EQ(c.gol.schedule.sigma0[0], 3.0);
  EXPECT_EQ(c.gol.mean.bounds[5].upper, 1.5);
  EXPECT_EQ(c.gol.train.epochs, 7);
  EXPECT_EQ(c.templates, dir / "t.txt");

  const auto text = format_config(c);
  io::write_text(dir / "again.cfg", text);
  ConfigValues raw2;
  raw2.merge_file(dir / "again.cfg");
  const auto c2 = build_config(raw2);
  EXPECT_EQ(format_config(c2), text);
  EXPECT_EQ(c2.gol.hash(), c.gol.hash());

  io::write_text(dir / "dup.cfg", "trainer.seed = 1\ntrainer.seed = 2\n");
  ConfigValues dup;
  EXPECT_THROW(dup.merge_file(dir / "dup.cfg"), ConfigError);
}
