// Small end-to-end run on the bundled glyphs: a short search, then the
// final classifier scored on the held-out glyphs.
#include <cstdio>

#include "gol/io.hpp"
#include "gol/trainer.hpp"

int main() {
  const std::string root = GOL_DATA_DIR "/glyphs/";
  const gol::io::ImageShape shape{32, 32, 1};
  const auto templates = gol::io::load_one_shot(root + "templates.txt", shape);
  const auto reg = gol::io::load_regularization(root + "regularization.txt", shape, templates.classes());
  const auto heldout = gol::io::load_samples(gol::io::read_manifest(root + "heldout.txt"), shape);

  gol::GolConfig cfg;
  cfg.episodes = 3;
  cfg.candidates = 4;
  cfg.samples = 200;
  cfg.train.epochs = 5;
  cfg.final_train.epochs = 10;
  cfg.seed = 1;

  gol::GolTrainer trainer(templates, reg, cfg);
  trainer.on_episode([&](int t, auto batch) {
    double best = 0;
    for (const auto& m : batch) best = std::max(best, m.z.accuracy);
    std::printf("episode %d: archive %zu, best candidate accuracy %.3f\n", t, trainer.archive().size(), best);
  });
  trainer.run();
  const auto res = trainer.finish();
  std::printf("front size %zu, held-out accuracy %.3f\n", res.front.size(), gol::accuracy(res.classifier, heldout));
}
