#include <gtest/gtest.h>

#include <fstream>

#include "gol/io.hpp"
#include "test_util.hpp"

using namespace gol;
using namespace gol::test;
namespace fs = std::filesystem;

namespace {

std::string what_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& needle) { return s.find(needle) != std::string::npos; }

Archive sample_archive(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Archive a;
  for (std::size_t i = 0; i < n; ++i) {
    SolutionRecord r;
    r.episode = static_cast<int>(i / 4) + 1;
    r.candidate = static_cast<int>(i % 4);
    r.seed = rng();
    for (std::size_t k = 0; k < kParamCount; ++k) r.theta.push_back(u(rng) / 3.0);
    r.z.energies = {u(rng), u(rng)};
    r.z.accuracy = u(rng);
    a.append(r);
  }
  return a;
}

}  // namespace

TEST(Images, RoundTripThroughEveryFormat) {
  std::mt19937_64 rng(1);
  const auto dir = scratch_dir("io_images");
  const auto gray = random_image(7, 5, 1, rng);
  const auto rgb = random_image(4, 6, 3, rng);
  for (const char* ext : {".png", ".pgm"}) {
    io::save_image(gray, dir / (std::string("g") + ext));
    EXPECT_EQ(io::load_image(dir / (std::string("g") + ext)), gray) << ext;
  }
  for (const char* ext : {".png", ".ppm"}) {
    io::save_image(rgb, dir / (std::string("c") + ext));
    EXPECT_EQ(io::load_image(dir / (std::string("c") + ext)), rgb) << ext;
  }
  EXPECT_THROW(io::save_image(gray, dir / "x.bmp"), IoError);
}

TEST(Images, ByteScaleEndpoints) {
  const auto dir = scratch_dir("io_endpoints");
  Image img(2, 1, 1, {0.0f, 1.0f});
  io::save_image(img, dir / "e.pgm");
  const auto back = io::load_image(dir / "e.pgm");
  EXPECT_EQ(back.at(0, 0), 0.0f);
  EXPECT_EQ(back.at(1, 0), 1.0f);
}

TEST(Images, DecodesTinyFixtureByHand) {
  const auto img = io::load_image(fixture_dir() / "tiny.ppm");
  ASSERT_EQ(img.width(), 3);
  ASSERT_EQ(img.height(), 2);
  ASSERT_EQ(img.channels(), 3);
  EXPECT_EQ(img.at(0, 0, 0), 1.0f);
  EXPECT_EQ(img.at(0, 0, 1), 0.0f);
  EXPECT_EQ(img.at(1, 0, 1), 1.0f);
  EXPECT_EQ(img.at(2, 0, 2), 1.0f);
  EXPECT_EQ(img.at(0, 1, 0), 0.0f);
  EXPECT_FLOAT_EQ(img.at(1, 1, 0), 128.0f / 255.0f);
  EXPECT_FLOAT_EQ(img.at(1, 1, 1), 64.0f / 255.0f);
  EXPECT_FLOAT_EQ(img.at(1, 1, 2), 32.0f / 255.0f);
  EXPECT_EQ(img.at(2, 1, 0), 1.0f);
}

TEST(Images, ErrorsNameThePath) {
  const auto dir = scratch_dir("io_bad");
  io::write_text(dir / "junk.png", "not an image at all");
  EXPECT_TRUE(contains(what_of([&] { io::load_image(dir / "junk.png"); }), "junk.png"));
  EXPECT_TRUE(contains(what_of([&] { io::load_image(dir / "absent.png"); }), "absent.png"));
  io::write_text(dir / "deep.pgm", "P5\n1 1\n65535\n\x01\x02");
  EXPECT_THROW(io::load_image(dir / "deep.pgm"), IoError);
}

TEST(Manifest, RoundTripAndValidation) {
  const auto dir = scratch_dir("io_manifest");
  std::mt19937_64 rng(2);
  std::vector<LabeledSample> samples;
  for (int i = 0; i < 6; ++i) samples.push_back({random_image(4, 4, 1, rng), i % 3});
  const auto m = io::export_dataset(samples, dir, {"a", "b", "c"});
  const auto back = io::read_manifest(dir / "manifest.txt");
  EXPECT_EQ(back.rows, m.rows);
  EXPECT_EQ(back.classes(), 3);
  EXPECT_EQ(back.rows[1].path, "class_1/00000.png");
  const auto loaded = io::load_samples(back, {4, 4, 1});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    EXPECT_EQ(loaded[i].label, samples[i].label);
    EXPECT_EQ(loaded[i].image, samples[i].image);
  }

  io::write_text(dir / "comments.txt", "gol-manifest 1\n# a comment\nclass_0/00000.png\t0\ta\n");
  EXPECT_EQ(io::read_manifest(dir / "comments.txt").rows.size(), 1u);

  io::write_text(dir / "skip.txt", "gol-manifest 1\nclass_0/00000.png\t0\ta\nclass_2/00000.png\t2\tc\n");
  EXPECT_TRUE(contains(what_of([&] { io::read_manifest(dir / "skip.txt").validate(); }), "class 1"));
  io::write_text(dir / "missing.txt", "gol-manifest 1\nnowhere.png\t0\ta\n");
  EXPECT_THROW(io::read_manifest(dir / "missing.txt").validate(), ConfigError);
  EXPECT_THROW(io::read_manifest(dir / "nope.txt"), ConfigError);
}

TEST(Gtsrb, ParsesAnnotationRow) {
  const auto a = io::parse_gtsrb_row("00000.ppm;29;30;5;6;24;25;0", "x:2");
  EXPECT_EQ(a, (io::GtsrbAnnotation{"00000.ppm", 29, 30, 5, 6, 24, 25, 0}));
  const auto rows = io::read_gtsrb_csv(fixture_dir() / "gtsrb" / "00001" / "GT-00001.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (io::GtsrbAnnotation{"00000.ppm", 40, 38, 4, 3, 35, 34, 1}));
  EXPECT_EQ(rows[1], (io::GtsrbAnnotation{"00001.ppm", 30, 30, 3, 3, 26, 26, 1}));
}

TEST(Gtsrb, MalformedRowReportsFileAndLine) {
  const auto dir = scratch_dir("io_gtsrb_bad");
  io::write_text(dir / "GT-00000.csv", std::string(io::kGtsrbHeader) + "\n00000.ppm;29;30;5;6;24;25;0\n00001.ppm;31;x;5;5;26;28;0\n");
  const auto msg = what_of([&] { io::read_gtsrb_csv(dir / "GT-00000.csv"); });
  EXPECT_TRUE(contains(msg, "GT-00000.csv:3")) << msg;
  EXPECT_THROW(io::parse_gtsrb_row("a.ppm;10;10;5;5;20;20;0", "w"), DataError);
  EXPECT_THROW(io::parse_gtsrb_row("a.ppm;10;10;5", "w"), DataError);
}

TEST(Gtsrb, IngestCropsAndWritesManifests) {
  const auto out = scratch_dir("io_gtsrb_out");
  io::GtsrbOptions opt;
  opt.shape = {32, 32, 3};
  opt.one_shot_from_first = true;
  opt.regularization_per_class = 1;
  const auto res = io::ingest_gtsrb(fixture_dir() / "gtsrb", out, opt);
  EXPECT_EQ(res.manifest.rows.size(), 4u);
  EXPECT_EQ(res.manifest.classes(), 2);
  ASSERT_TRUE(res.one_shot.has_value());
  EXPECT_EQ(res.one_shot->classes(), 2);
  EXPECT_EQ(res.regularization.size(), 2u);
  EXPECT_TRUE(fs::exists(out / "templates.txt"));
  EXPECT_TRUE(fs::exists(out / "regularization.txt"));

  // The stored sample is the inclusive ROI crop, resized.
  const auto full = io::load_image(fixture_dir() / "gtsrb" / "00000" / "00000.ppm");
  const auto expected = io::normalize_image(crop(full, 5, 6, 24, 25), opt.shape);
  const auto stored = io::load_image(out / "00000" / "00000.png");
  ASSERT_EQ(stored.width(), 32);
  for (std::size_t i = 0; i < stored.pixels().size(); ++i)
    EXPECT_EQ(stored.pixels()[i], static_cast<float>(io::to_byte(expected.pixels()[i])) / 255.0f);

  const auto first = io::read_text(out / "manifest.txt");
  const auto bytes = io::read_text(out / "00001" / "00001.png");
  io::ingest_gtsrb(fixture_dir() / "gtsrb", out, opt);
  EXPECT_EQ(io::read_text(out / "manifest.txt"), first);
  EXPECT_EQ(io::read_text(out / "00001" / "00001.png"), bytes);
}

TEST(Gtsrb, EmptyClassFolderIsNamed) {
  const auto root = scratch_dir("io_gtsrb_empty");
  fs::copy(fixture_dir() / "gtsrb", root, fs::copy_options::recursive);
  io::write_text(root / "00002" / "GT-00002.csv", std::string(io::kGtsrbHeader) + "\n");
  const auto msg = what_of([&] { io::ingest_gtsrb(root, scratch_dir("io_gtsrb_empty_out")); });
  EXPECT_TRUE(contains(msg, "00002")) << msg;
}

TEST(ArchiveFile, RoundTripIsExact) {
  const auto dir = scratch_dir("io_archive");
  const auto a = sample_archive(9, 3);
  io::write_archive(a, dir / "archive.tsv");
  EXPECT_EQ(io::read_archive(dir / "archive.tsv"), a);
  io::write_text(dir / "broken.tsv", io::format_archive(a) + "1\t0\t5\tx\t0.1,0.2\t0.5\n");
  const auto msg = what_of([&] { io::read_archive(dir / "broken.tsv"); });
  EXPECT_TRUE(contains(msg, "broken.tsv:12")) << msg;
  EXPECT_THROW(io::read_archive(dir / "absent.tsv"), ConfigError);
}

TEST(ObjectiveCsv, FlagsFrontAndReparsesExactly) {
  const auto dir = scratch_dir("io_csv");
  Archive a;
  // Three mutually non-dominated points and seven dominated by (0.9, 0.9, 0.9).
  const std::vector<std::vector<double>> z{{0.9, 0.9, 0.9}, {1.0, 0.1, 0.2}, {0.1, 1.0, 0.3}, {0.5, 0.5, 0.5},
                                           {0.2, 0.2, 0.2}, {0.8, 0.8, 0.1}, {0.3, 0.4, 0.5}, {0.1, 0.1, 0.1},
                                           {0.6, 0.6, 0.6}, {0.0, 0.0, 0.0}};
  for (std::size_t i = 0; i < z.size(); ++i) {
    SolutionRecord r;
    r.episode = 1;
    r.candidate = static_cast<int>(i);
    r.theta.assign(kParamCount, 0.0);
    r.z = {{z[i][0], z[i][1]}, z[i][2]};
    a.append(r);
  }
  io::export_objective_csv(a, dir / "objectives.csv");
  EXPECT_EQ(io::read_lines(dir / "objectives.csv")[0], "episode,candidate,J_1,J_2,accuracy,on_front");
  const auto rows = io::read_objective_csv(dir / "objectives.csv");
  ASSERT_EQ(rows.size(), 10u);
  std::size_t on = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].z, a[i].z);
    EXPECT_EQ(rows[i].candidate, static_cast<int>(i));
    on += rows[i].on_front;
  }
  EXPECT_EQ(on, 3u);
  EXPECT_TRUE(rows[0].on_front && rows[1].on_front && rows[2].on_front);
}

TEST(ModelFile, RoundTripKeepsParametersAndPredictions) {
  const auto dir = scratch_dir("io_model");
  Classifier c(Architecture::parse("conv3x3x2,pool2,fc5", 1, 10, 10, 3));
  c.initialize(4);
  c.mark_trained();
  io::save_model(c, dir / "model.txt");
  const auto back = io::load_model(dir / "model.txt");
  EXPECT_EQ(back.architecture(), c.architecture());
  const auto p = std::as_const(c).params();
  const auto q = back.params();
  ASSERT_EQ(p.size(), q.size());
  for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(p[i], q[i]);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    const auto img = random_image(10, 10, 1, rng);
    EXPECT_EQ(back.predict_proba(img), c.predict_proba(img));
  }
  const auto lines = io::read_lines(dir / "model.txt");
  EXPECT_EQ(lines[0], "gol-model 1");
  EXPECT_EQ(lines[1], "input 1 10 10");
  EXPECT_EQ(lines[2], "classes 3");
  EXPECT_EQ(lines[3], "arch conv3x3x2,pool2,fc5");
  io::write_text(dir / "short.txt", io::read_text(dir / "model.txt").substr(0, 80));
  EXPECT_THROW(io::load_model(dir / "short.txt"), DataError);
}

TEST(CheckpointFile, RoundTrip) {
  const auto dir = scratch_dir("io_checkpoint");
  TrainerCheckpoint cp{0xDEADBEEFCAFEull, 7, {3, 1, 4}, {0.25, 1.0 / 3.0}};
  io::write_checkpoint(cp, dir / "c.txt");
  const auto back = io::read_checkpoint(dir / "c.txt");
  EXPECT_EQ(back.config_hash, cp.config_hash);
  EXPECT_EQ(back.next_episode, 7);
  EXPECT_EQ(back.population, cp.population);
  EXPECT_EQ(back.mean, cp.mean);
  TrainerCheckpoint empty{1, 2, {}, {}};
  io::write_checkpoint(empty, dir / "e.txt");
  EXPECT_TRUE(io::read_checkpoint(dir / "e.txt").population.empty());
}

TEST(Montage, GridShapeAndTemplateColumn) {
  const auto s = bar_templates(3, 8);
  SyntheticDataset stage;
  stage.classes = 3;
  for (int j = 0; j < 5; ++j)
    for (int k = 0; k < 3; ++k) stage.samples.push_back({s.templ(k), k});
  const std::vector<SyntheticDataset> stages{stage};
  const auto m = io::build_montage(s, stages, 5);
  EXPECT_EQ(m.width(), 8 * 6);
  EXPECT_EQ(m.height(), 8 * 3);
  for (int k = 0; k < 3; ++k)
    for (int y = 0; y < 8; ++y)
      for (int x = 0; x < 8; ++x) EXPECT_EQ(m.at(x, k * 8 + y), s.templ(k).at(x, y));
  const auto dir = scratch_dir("io_montage");
  EXPECT_THROW(io::export_montage(s, std::span<const SyntheticDataset>{}, 5, dir / "m.png"), DataError);
}
