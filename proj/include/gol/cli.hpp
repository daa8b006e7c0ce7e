#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gol/config.hpp"
#include "gol/error.hpp"
#include "gol/io.hpp"
#include "gol/trainer.hpp"

namespace gol::cli {

namespace fs = std::filesystem;

enum Exit : int { kOk = 0, kRuntime = 1, kUsage = 2 };

/// Flags shared by every subcommand. Each one writes into the same raw key
/// space as the config file, so a flag is just a late override.
struct CommonFlags {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads, episodes, candidates;
  std::optional<std::size_t> samples;
  std::optional<std::string> energy, mode, out, templates, regularization;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "key = value configuration file");
    app.add_option("--set", sets, "override any configuration key (key=value), repeatable");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--threads", threads, "worker threads for candidate evaluation");
    app.add_option("--episodes", episodes, "episodes T");
    app.add_option("--candidates", candidates, "candidates per episode C");
    app.add_option("--samples", samples, "synthetic samples m per candidate");
    app.add_option("--energy", energy, "bhattacharyya|qnorm|loglik");
    app.add_option("--mode", mode, "variance-search|evolutionary|scalarized");
    app.add_option("--out", out, "output directory");
    app.add_option("--templates", templates, "template manifest");
    app.add_option("--regularization", regularization, "regularization manifest");
  }

  CliConfig resolve() const {
    ConfigValues raw;
    if (!config.empty()) raw.merge_file(config);
    auto put = [&](const char* key, const auto& v) {
      if (!v) return;
      if constexpr (std::is_same_v<std::decay_t<decltype(*v)>, std::string>)
        raw.set(key, *v);
      else
        raw.set(key, std::to_string(*v));
    };
    put("trainer.seed", seed);
    put("trainer.threads", threads);
    put("trainer.episodes", episodes);
    put("trainer.candidates", candidates);
    put("trainer.samples", samples);
    put("energy.mode", energy);
    put("trainer.mode", mode);
    put("paths.out", out);
    put("paths.templates", templates);
    put("paths.regularization", regularization);
    for (const auto& s : sets) raw.merge_assignment(s);
    return build_config(raw);
  }
};

struct Inputs {
  OneShotSet templates;
  RegularizationSet regularization;
};

inline Inputs load_inputs(const CliConfig& c) {
  if (c.templates.empty()) throw ConfigError("paths.templates is not set");
  if (c.regularization.empty()) throw ConfigError("paths.regularization is not set");
  auto s = io::load_one_shot(c.templates, c.shape);
  auto e = io::load_regularization(c.regularization, c.shape, s.classes());
  if (e.classes() != s.classes()) throw ConfigError("regularization manifest class count differs from templates");
  return {std::move(s), std::move(e)};
}

inline std::string percent(double a) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << 100.0 * a;
  return ss.str();
}

// Writes the archive and checkpoint so a later --resume continues from here.
inline void save_progress(const GolTrainer& trainer, const fs::path& out) {
  io::write_archive(trainer.archive(), out / "archive.tsv");
  io::write_checkpoint(trainer.checkpoint(), out / "checkpoint.txt");
  std::string metrics = io::metrics_header();
  for (const auto& m : trainer.metrics()) metrics += io::format_metrics_line(m);
  io::write_text(out / "metrics.tsv", metrics);
}

inline int cmd_train(const CliConfig& c, bool resume, std::ostream& log) {
  const auto start = std::chrono::steady_clock::now();
  auto in = load_inputs(c);
  for (const auto& w : sizing_warnings(in.templates.classes(), c.gol.samples, in.regularization.size()))
    log << "warning: " << w << "\n";
  fs::create_directories(c.out);
  io::write_text(c.out / "config.txt", format_config(c));

  std::optional<GolTrainer> trainer;
  if (resume && fs::exists(c.out / "checkpoint.txt")) {
    trainer.emplace(in.templates, in.regularization, c.gol, io::read_archive(c.out / "archive.tsv"),
                    io::read_checkpoint(c.out / "checkpoint.txt"));
    log << "resuming at episode " << trainer->next_episode() << "\n";
  } else {
    trainer.emplace(in.templates, in.regularization, c.gol);
  }
  const fs::path out = c.out;
  GolTrainer& t = *trainer;
  t.on_episode([&](int episode, std::span<const CandidateMetrics> batch) {
    double best = 0.0, secs = 0.0;
    for (const auto& m : batch) best = std::max(best, m.z.accuracy), secs += m.wall_seconds;
    log << "episode " << episode << "/" << c.gol.episodes << ": archive " << t.archive().size() << ", front "
        << pareto_front(t.archive()).size() << ", best accuracy " << percent(best) << "%, " << std::fixed
        << std::setprecision(1) << secs << " s\n";
    save_progress(t, out);
  });
  t.run();
  save_progress(t, out);

  log << "training final classifier\n";
  const auto res = t.finish();
  io::export_objective_csv(res.archive, out / "objectives.csv");
  io::save_model(res.classifier, out / "model.txt");
  io::export_dataset(res.final_holdout.samples, out / "final_holdout");

  std::vector<SyntheticDataset> stages;
  for (std::size_t i = 0; i < std::min(c.montage_stages, res.front.size()); ++i) {
    const auto& r = res.front[i];
    const std::size_t m = c.montage_samples * static_cast<std::size_t>(in.templates.classes());
    stages.push_back(generate(in.templates, GeneratorParams{r.theta, c.gol.mean.bounds}, m, r.seed));
  }
  if (c.montage_samples > 0 && !stages.empty())
    io::export_montage(in.templates, stages, c.montage_samples, out / "montage.png");

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string front;
  for (const auto& r : res.front)
    front += std::to_string(r.episode) + "\t" + std::to_string(r.candidate) + "\t" + join_doubles(r.theta) + "\n";
  io::write_text(out / "front.tsv", "episode\tcandidate\ttheta\n" + front);
  io::write_text(out / "summary.txt", "front_size = " + std::to_string(res.front.size()) +
                                          "\nfinal_pool_size = " + std::to_string(res.final_pool_size) +
                                          "\nfinal_holdout_size = " + std::to_string(res.final_holdout.size()) +
                                          "\nfinal_holdout_accuracy = " + format_double(res.final_holdout_accuracy) +
                                          "\nwall_seconds = " + format_double(secs) + "\n");
  log << "front " << res.front.size() << ", final holdout accuracy " << percent(res.final_holdout_accuracy)
      << "%, " << std::fixed << std::setprecision(1) << secs << " s\n";
  return kOk;
}

/// Theta source: "identity", "front:<i>" (index into the archive's front, in
/// archive order), or "file:<path>" (one comma-separated vector).
inline int cmd_generate(const CliConfig& c, const std::string& source, const fs::path& archive_path,
                        std::optional<std::size_t> count, const fs::path& dest, std::ostream& log) {
  auto s = io::load_one_shot(c.templates, c.shape);
  GeneratorParams theta = GeneratorParams::identity(c.gol.mean.bounds);
  std::uint64_t seed = c.gol.seed;
  if (source == "identity") {
  } else if (source.starts_with("front:")) {
    const auto i = parse_number<std::size_t>(std::string_view(source).substr(6), "front index");
    const auto front = pareto_front(io::read_archive(archive_path));
    if (i >= front.size())
      throw ConfigError("front index " + std::to_string(i) + " out of range (front has " +
                        std::to_string(front.size()) + " members)");
    theta.theta = front[i].theta;
    seed = front[i].seed;
  } else if (source.starts_with("file:")) {
    const fs::path p = source.substr(5);
    if (!fs::exists(p)) throw ConfigError("theta file not found: " + p.string());
    theta.theta = parse_doubles(trim(io::read_text(p)), "theta");
    if (theta.theta.size() != kParamCount)
      throw ConfigError("theta file must hold " + std::to_string(kParamCount) + " values");
  } else {
    throw ConfigError("unknown theta source '" + source + "' (identity|front:<i>|file:<path>)");
  }
  theta.validate();
  const auto d = generate(s, theta, count.value_or(c.gol.samples), seed);
  io::export_dataset(d.samples, dest);
  log << "wrote " << d.size() << " samples to " << dest.string() << "\n";
  return kOk;
}

inline int cmd_front(const fs::path& archive_path, const std::optional<fs::path>& csv, std::ostream& out) {
  const auto archive = io::read_archive(archive_path);
  const auto front = pareto_front(archive);
  out << "episode\tcandidate\tseed\ttheta\tenergies\taccuracy\n";
  for (const auto& r : front)
    out << r.episode << "\t" << r.candidate << "\t" << r.seed << "\t" << join_doubles(r.theta) << "\t"
        << join_doubles(r.z.energies) << "\t" << format_double(r.z.accuracy) << "\n";
  if (csv) io::export_objective_csv(archive, *csv);
  return kOk;
}

/// Category map lines: "<class index> <category name>".
inline std::map<int, std::string> read_category_map(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("category map not found: " + path.string());
  std::map<int, std::string> out;
  const auto lines = io::read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto sp = line.find_first_of(" \t");
    if (sp == std::string_view::npos)
      throw ConfigError(path.string() + ":" + std::to_string(i + 1) + ": expected '<class> <category>'");
    out[parse_number<int>(line.substr(0, sp), "class index")] = std::string(trim(line.substr(sp + 1)));
  }
  return out;
}

inline int cmd_eval(const fs::path& model_path, const fs::path& manifest_path,
                    const std::optional<fs::path>& categories, std::ostream& out) {
  const auto model = io::load_model(model_path);
  const auto manifest = io::read_manifest(manifest_path);
  const auto& a = model.architecture();
  if (manifest.classes() != a.classes)
    throw ConfigError("model has " + std::to_string(a.classes) + " classes, manifest has " +
                      std::to_string(manifest.classes()));
  const auto samples = io::load_samples(manifest, {a.width, a.height, a.channels});
  std::vector<std::size_t> hit(static_cast<std::size_t>(a.classes)), total(hit.size());
  for (const auto& s : samples) {
    const auto k = static_cast<std::size_t>(s.label);
    ++total[k];
    if (model.predict(s.image) == s.label) ++hit[k];
  }
  std::size_t h = 0;
  for (auto v : hit) h += v;
  out << "overall\t" << percent(samples.empty() ? 0.0 : static_cast<double>(h) / samples.size()) << "\t"
      << samples.size() << "\n";
  for (std::size_t k = 0; k < hit.size(); ++k)
    if (total[k] > 0) out << "class " << k << "\t" << percent(static_cast<double>(hit[k]) / total[k]) << "\t" << total[k] << "\n";
  if (categories) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> groups;
    for (const auto& [k, name] : read_category_map(*categories)) {
      if (k < 0 || k >= a.classes) continue;
      groups[name].first += hit[static_cast<std::size_t>(k)];
      groups[name].second += total[static_cast<std::size_t>(k)];
    }
    for (const auto& [name, ht] : groups)
      if (ht.second > 0) out << "category " << name << "\t" << percent(static_cast<double>(ht.first) / ht.second) << "\t" << ht.second << "\n";
  }
  return kOk;
}

inline int cmd_ingest(const fs::path& root, const fs::path& dest, const io::GtsrbOptions& opt, std::ostream& log) {
  const auto res = io::ingest_gtsrb(root, dest, opt);
  log << "ingested " << res.manifest.rows.size() << " images in " << res.manifest.classes() << " classes into "
      << dest.string() << "\n";
  return kOk;
}

/// Parses arguments (without the program name) and runs one subcommand.
/// Artifacts go to files; `out` carries command results, `err` progress and
/// diagnostics.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Generative one-shot learning toolkit", "gol"};
  app.require_subcommand(1);

  CommonFlags common;
  bool resume = false;
  auto* train = app.add_subcommand("train", "run the episode loop and build the final classifier");
  common.attach(*train);
  train->add_flag("--resume", resume, "continue from checkpoint.txt in the output directory");

  auto* gen = app.add_subcommand("generate", "write a synthetic dataset for one parameter vector");
  CommonFlags gen_common;
  gen_common.attach(*gen);
  std::string theta_source = "identity";
  std::string gen_archive, gen_dest;
  std::optional<std::size_t> gen_count;
  gen->add_option("--theta", theta_source, "identity | front:<i> | file:<path>");
  gen->add_option("--archive", gen_archive, "archive for front:<i> (default <out>/archive.tsv)");
  gen->add_option("--count", gen_count, "samples to write (default trainer.samples)");
  gen->add_option("--dest", gen_dest, "destination directory (default <out>/generated)");

  auto* front = app.add_subcommand("front", "print the Pareto front of an archive");
  CommonFlags front_common;
  front_common.attach(*front);
  std::string front_archive, front_csv;
  front->add_option("--archive", front_archive, "archive file (default <out>/archive.tsv)");
  front->add_option("--csv", front_csv, "also export the objective CSV here");

  auto* eval = app.add_subcommand("eval", "accuracy of a saved model on a manifest");
  CommonFlags eval_common;
  eval_common.attach(*eval);
  std::string model, manifest, categories;
  eval->add_option("--model", model, "model file")->required();
  eval->add_option("--manifest", manifest, "dataset manifest")->required();
  eval->add_option("--categories", categories, "class-to-category map");

  auto* ingest = app.add_subcommand("ingest-gtsrb", "crop and resize a GTSRB training tree");
  CommonFlags ingest_common;
  ingest_common.attach(*ingest);
  std::string root, dest;
  io::GtsrbOptions gopt;
  ingest->add_option("--root", root, "directory holding the numbered class folders")->required();
  ingest->add_option("--dest", dest, "output directory")->required();
  ingest->add_option("--regularization-per-class", gopt.regularization_per_class, "samples per class for regularization.txt");
  ingest->add_flag("--templates-from-first", gopt.one_shot_from_first, "first image of each class becomes its template");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*train) return cmd_train(common.resolve(), resume, err);
    if (*gen) {
      const auto c = gen_common.resolve();
      return cmd_generate(c, theta_source, gen_archive.empty() ? c.out / "archive.tsv" : fs::path(gen_archive),
                          gen_count, gen_dest.empty() ? c.out / "generated" : fs::path(gen_dest), err);
    }
    if (*front) {
      const auto c = front_common.resolve();
      return cmd_front(front_archive.empty() ? c.out / "archive.tsv" : fs::path(front_archive),
                       front_csv.empty() ? std::nullopt : std::optional<fs::path>(front_csv), out);
    }
    if (*eval) {
      eval_common.resolve();
      return cmd_eval(model, manifest, categories.empty() ? std::nullopt : std::optional<fs::path>(categories), out);
    }
    if (*ingest) {
      gopt.shape = ingest_common.resolve().shape;
      return cmd_ingest(root, dest, gopt, err);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParameterError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace gol::cli
