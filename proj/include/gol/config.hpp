#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gol/error.hpp"
#include "gol/format.hpp"
#include "gol/generator.hpp"
#include "gol/io.hpp"
#include "gol/trainer.hpp"

namespace gol {

/// Everything one CLI invocation needs: the trainer configuration plus the
/// input/output locations and the working image shape.
struct CliConfig {
  GolConfig gol;
  std::filesystem::path templates;       // manifest of one template per class
  std::filesystem::path regularization;  // manifest of real labeled samples
  std::filesystem::path out = "gol_out";
  io::ImageShape shape;
  std::size_t montage_samples = 5;  // per stage column block
  std::size_t montage_stages = 3;   // front members shown
};

/// Raw key/value layer. Files hold "key = value" lines; '#' starts a comment.
class ConfigValues {
public:
  void set(std::string key, std::string value) { values_[std::move(key)] = std::move(value); }

  void merge_file(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
    const auto lines = io::read_lines(path);
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      std::string_view line = lines[i];
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      const std::string where = path.string() + ":" + std::to_string(i + 1);
      if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
      std::string key(trim(line.substr(0, eq)));
      if (key.empty()) throw ConfigError(where + ": empty key");
      if (auto [it, fresh] = seen.emplace(key, i + 1); !fresh)
        throw ConfigError(where + ": duplicate key '" + key + "' (first on line " + std::to_string(it->second) + ")");
      std::string value(trim(line.substr(eq + 1)));
      // Relative paths in a file are relative to that file.
      if (key.starts_with("paths.") && !value.empty() && std::filesystem::path(value).is_relative())
        value = (path.parent_path() / value).lexically_normal().string();
      set(std::move(key), std::move(value));
    }
  }

  // "key=value" as given to --set.
  void merge_assignment(std::string_view kv) {
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos || trim(kv.substr(0, eq)).empty())
      throw ConfigError("expected key=value, got '" + std::string(kv) + "'");
    set(std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))));
  }

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

private:
  std::map<std::string, std::string> values_;
};

inline std::string_view mode_name(OptimizerMode m) {
  switch (m) {
    case OptimizerMode::VarianceSearch: return "variance-search";
    case OptimizerMode::Evolutionary: return "evolutionary";
    case OptimizerMode::Scalarized: return "scalarized";
  }
  return "?";
}

inline OptimizerMode parse_mode(std::string_view s) {
  if (s == "variance-search" || s == "variance_search") return OptimizerMode::VarianceSearch;
  if (s == "evolutionary") return OptimizerMode::Evolutionary;
  if (s == "scalarized") return OptimizerMode::Scalarized;
  throw ConfigError("unknown optimizer mode '" + std::string(s) + "' (variance-search|evolutionary|scalarized)");
}

inline std::string_view energy_name(EnergyMode::Kind k) {
  switch (k) {
    case EnergyMode::Kind::Bhattacharyya: return "bhattacharyya";
    case EnergyMode::Kind::QNorm: return "qnorm";
    case EnergyMode::Kind::LogLikelihood: return "loglik";
  }
  return "?";
}

inline EnergyMode::Kind parse_energy(std::string_view s) {
  if (s == "bhattacharyya") return EnergyMode::Kind::Bhattacharyya;
  if (s == "qnorm") return EnergyMode::Kind::QNorm;
  if (s == "loglik") return EnergyMode::Kind::LogLikelihood;
  throw ConfigError("unknown energy mode '" + std::string(s) + "' (bhattacharyya|qnorm|loglik)");
}

namespace detail {

template <typename T>
T number(const std::string& key, const std::string& v) {
  try {
    return parse_number<T>(v, key);
  } catch (const ConfigError&) {
    throw ConfigError(key + ": cannot parse '" + v + "'");
  }
}

inline std::vector<double> registry_vector(const std::string& key, const std::string& v) {
  std::vector<double> out;
  try {
    out = parse_doubles(v, key);
  } catch (const ConfigError&) {
    throw ConfigError(key + ": cannot parse '" + v + "'");
  }
  if (out.size() != kParamCount)
    throw ConfigError(key + ": expected " + std::to_string(kParamCount) + " values (one per transform), got " +
                      std::to_string(out.size()));
  return out;
}

inline std::size_t registry_index(const std::string& key, std::string_view name) {
  const auto i = transform_index(name);
  if (!i) throw ConfigError("unknown key '" + key + "': no transform named '" + std::string(name) + "'");
  return *i;
}

inline void train_key(TrainConfig& t, std::string_view field, const std::string& key, const std::string& v) {
  if (field == "epochs") t.epochs = number<int>(key, v);
  else if (field == "learning_rate") t.learning_rate = number<double>(key, v);
  else if (field == "momentum") t.momentum = number<double>(key, v);
  else if (field == "batch_size") t.batch_size = number<int>(key, v);
  else if (field == "holdout") t.holdout_fraction = number<double>(key, v);
  else throw ConfigError("unknown key '" + key + "'");
}

}  // namespace detail

/// Builds a CliConfig from raw values. Unknown keys are rejected; registry
/// vectors must have one entry per transform. Schedule resolution order:
/// bounds, then fractions of the bound width, then explicit vectors, then
/// per-transform overrides.
inline CliConfig build_config(const ConfigValues& raw) {
  CliConfig c;
  auto& g = c.gol;
  std::vector<Bounds> bounds = GeneratorParams::default_bounds();
  double sigma0_fraction = 0.05, delta_fraction = 0.03;
  std::optional<std::vector<double>> mean, sigma0, delta;
  std::map<std::size_t, double> mean_one, sigma0_one, delta_one;

  for (const auto& [key, v] : raw.values()) {
    using detail::number;
    auto after = [&](std::string_view prefix) -> std::optional<std::string_view> {
      if (std::string_view(key).starts_with(prefix)) return std::string_view(key).substr(prefix.size());
      return std::nullopt;
    };
    if (key == "trainer.episodes") g.episodes = number<int>(key, v);
    else if (key == "trainer.candidates") g.candidates = number<int>(key, v);
    else if (key == "trainer.samples") g.samples = number<std::size_t>(key, v);
    else if (key == "trainer.mode") g.mode = parse_mode(v);
    else if (key == "trainer.seed") g.seed = number<std::uint64_t>(key, v);
    else if (key == "trainer.threads") g.threads = number<int>(key, v);
    else if (key == "trainer.lambda") g.lambda.lambda = parse_doubles(v, key);
    else if (key == "trainer.final_pool_cap") g.final_pool_cap = number<std::size_t>(key, v);
    else if (key == "energy.mode") g.energy.kind = parse_energy(v);
    else if (key == "energy.q") g.energy.q = number<double>(key, v);
    else if (key == "energy.bins") g.energy.bins = number<int>(key, v);
    else if (key == "energy.aggregation") {
      if (v == "mean") g.energy.aggregation = EnergyMode::Aggregation::Mean;
      else if (v == "sum") g.energy.aggregation = EnergyMode::Aggregation::Sum;
      else throw ConfigError(key + ": expected mean or sum, got '" + v + "'");
    } else if (key == "generator.sigma0_fraction") sigma0_fraction = number<double>(key, v);
    else if (key == "generator.delta_fraction") delta_fraction = number<double>(key, v);
    else if (key == "generator.mean") mean = detail::registry_vector(key, v);
    else if (key == "generator.sigma0") sigma0 = detail::registry_vector(key, v);
    else if (key == "generator.delta") delta = detail::registry_vector(key, v);
    else if (auto n = after("generator.bounds.")) {
      const auto b = parse_doubles(v, key);
      if (b.size() != 2) throw ConfigError(key + ": expected 'lower,upper'");
      bounds[detail::registry_index(key, *n)] = {b[0], b[1]};
    } else if (auto n = after("generator.mean.")) mean_one[detail::registry_index(key, *n)] = number<double>(key, v);
    else if (auto n = after("generator.sigma0.")) sigma0_one[detail::registry_index(key, *n)] = number<double>(key, v);
    else if (auto n = after("generator.delta.")) delta_one[detail::registry_index(key, *n)] = number<double>(key, v);
    else if (key == "classifier.arch") g.arch = v;
    else if (auto f = after("classifier.")) detail::train_key(g.train, *f, key, v);
    else if (auto f = after("final.")) detail::train_key(g.final_train, *f, key, v);
    else if (key == "paths.templates") c.templates = v;
    else if (key == "paths.regularization") c.regularization = v;
    else if (key == "paths.out") c.out = v;
    else if (key == "image.width") c.shape.width = number<int>(key, v);
    else if (key == "image.height") c.shape.height = number<int>(key, v);
    else if (key == "image.channels") c.shape.channels = number<int>(key, v);
    else if (key == "output.montage_samples") c.montage_samples = number<std::size_t>(key, v);
    else if (key == "output.montage_stages") c.montage_stages = number<std::size_t>(key, v);
    else throw ConfigError("unknown key '" + key + "'");
  }

  for (const auto& b : bounds)
    if (!(b.lower <= b.upper)) throw ConfigError("generator bounds need lower <= upper");
  g.schedule = VarianceSchedule::proportional(sigma0_fraction, delta_fraction, bounds);
  if (sigma0) g.schedule.sigma0 = *sigma0;
  if (delta) g.schedule.delta = *delta;
  for (auto [i, v] : sigma0_one) g.schedule.sigma0[i] = v;
  for (auto [i, v] : delta_one) g.schedule.delta[i] = v;
  g.mean = GeneratorParams::identity(bounds);
  if (mean) g.mean.theta = *mean;
  for (auto [i, v] : mean_one) g.mean.theta[i] = v;

  if (c.shape.width < 1 || c.shape.height < 1) throw ConfigError("image size must be positive");
  if (c.shape.channels != 1 && c.shape.channels != 3) throw ConfigError("image.channels must be 1 or 3");
  return c;
}

/// The resolved configuration in file form; feeding it back through
/// build_config reproduces the same CliConfig.
inline std::string format_config(const CliConfig& c) {
  const auto& g = c.gol;
  std::string out;
  auto line = [&](std::string_view k, const std::string& v) { out += std::string(k) + " = " + v + "\n"; };
  line("trainer.episodes", std::to_string(g.episodes));
  line("trainer.candidates", std::to_string(g.candidates));
  line("trainer.samples", std::to_string(g.samples));
  line("trainer.mode", std::string(mode_name(g.mode)));
  line("trainer.seed", std::to_string(g.seed));
  line("trainer.threads", std::to_string(g.threads));
  if (!g.lambda.lambda.empty()) line("trainer.lambda", join_doubles(g.lambda.lambda));
  line("trainer.final_pool_cap", std::to_string(g.final_pool_cap));
  line("energy.mode", std::string(energy_name(g.energy.kind)));
  line("energy.q", format_double(g.energy.q));
  line("energy.bins", std::to_string(g.energy.bins));
  line("energy.aggregation", g.energy.aggregation == EnergyMode::Aggregation::Mean ? "mean" : "sum");
  for (std::size_t i = 0; i < kParamCount; ++i)
    line("generator.bounds." + std::string(kTransforms[i].name),
         format_double(g.mean.bounds[i].lower) + "," + format_double(g.mean.bounds[i].upper));
  line("generator.mean", join_doubles(g.mean.theta));
  line("generator.sigma0", join_doubles(g.schedule.sigma0));
  line("generator.delta", join_doubles(g.schedule.delta));
  line("classifier.arch", g.arch);
  for (auto [prefix, t] : {std::pair{"classifier.", &g.train}, std::pair{"final.", &g.final_train}}) {
    const std::string p = prefix;
    line(p + "epochs", std::to_string(t->epochs));
    line(p + "learning_rate", format_double(t->learning_rate));
    line(p + "momentum", format_double(t->momentum));
    line(p + "batch_size", std::to_string(t->batch_size));
    line(p + "holdout", format_double(t->holdout_fraction));
  }
  // Absolute, so the file can be fed back through --config from anywhere.
  auto path = [](const std::filesystem::path& p) { return p.empty() ? std::string() : std::filesystem::absolute(p).string(); };
  line("paths.templates", path(c.templates));
  line("paths.regularization", path(c.regularization));
  line("paths.out", path(c.out));
  line("image.width", std::to_string(c.shape.width));
  line("image.height", std::to_string(c.shape.height));
  line("image.channels", std::to_string(c.shape.channels));
  line("output.montage_samples", std::to_string(c.montage_samples));
  line("output.montage_stages", std::to_string(c.montage_stages));
  return out;
}

}  // namespace gol
