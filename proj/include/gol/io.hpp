#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gol/classifier.hpp"
#include "gol/core.hpp"
#include "gol/energy.hpp"
#include "gol/error.hpp"
#include "gol/format.hpp"
#include "gol/pareto.hpp"
#include "gol/trainer.hpp"

namespace gol::io {

namespace fs = std::filesystem;

inline std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::vector<std::string> read_lines(const fs::path& path) {
  const std::string text = read_text(path);
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    std::string line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    pos = end + 1;
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Images: PNG through libpng, binary and ASCII PGM/PPM natively.
// ---------------------------------------------------------------------------

inline std::uint8_t to_byte(float v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f));
}

inline Image from_bytes(int w, int h, int c, std::span<const std::uint8_t> bytes) {
  std::vector<float> px(bytes.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) px[i] = static_cast<float>(bytes[i]) / 255.0f;
  return Image(w, h, c, std::move(px));
}

namespace detail {

inline Image decode_png(const fs::path& path, const std::string& data) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, data.data(), data.size()))
    throw IoError("cannot decode PNG " + path.string() + ": " + img.message);
  const bool color = (img.format & PNG_FORMAT_FLAG_COLOR) != 0;
  img.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
  png_color background{0, 0, 0};
  if (!png_image_finish_read(&img, &background, buf.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError("cannot decode PNG " + path.string() + ": " + msg);
  }
  return from_bytes(static_cast<int>(img.width), static_cast<int>(img.height), color ? 3 : 1, buf);
}

inline void encode_png(const Image& image, const fs::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> buf(image.size());
  const auto px = image.pixels();
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = to_byte(px[i]);
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(img, size, 0, buf.data(), 0, nullptr))
    throw IoError("cannot encode PNG " + path.string() + ": " + img.message);
  std::string out(size, '\0');
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, buf.data(), 0, nullptr))
    throw IoError("cannot encode PNG " + path.string() + ": " + img.message);
  out.resize(size);
  write_text(path, out);
}

inline Image decode_pnm(const fs::path& path, const std::string& data) {
  std::size_t pos = 2;
  auto fail = [&](const std::string& why) { return IoError("cannot decode PNM " + path.string() + ": " + why); };
  auto next_token = [&]() {
    while (pos < data.size()) {
      if (data[pos] == '#') {
        while (pos < data.size() && data[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos]))) ++pos;
    if (start == pos) throw fail("truncated header");
    return std::string_view(data).substr(start, pos - start);
  };
  const char kind = data[1];
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  int w = 0, h = 0, maxval = 0;
  try {
    w = parse_number<int>(next_token(), "width");
    h = parse_number<int>(next_token(), "height");
    maxval = parse_number<int>(next_token(), "maxval");
  } catch (const ConfigError& e) {
    throw fail(e.what());
  }
  if (w <= 0 || h <= 0) throw fail("bad dimensions");
  if (maxval <= 0 || maxval > 255) throw fail("only 8-bit PNM is supported");
  const std::size_t count = static_cast<std::size_t>(w) * h * channels;
  std::vector<std::uint8_t> bytes(count);
  if (kind == '5' || kind == '6') {
    ++pos;  // single whitespace after maxval
    if (data.size() < pos + count) throw fail("truncated pixel data");
    std::copy_n(reinterpret_cast<const std::uint8_t*>(data.data() + pos), count, bytes.begin());
  } else {
    for (std::size_t i = 0; i < count; ++i) bytes[i] = static_cast<std::uint8_t>(parse_number<int>(next_token(), "pixel"));
  }
  if (maxval != 255)
    for (auto& b : bytes) b = static_cast<std::uint8_t>(std::lround(b * 255.0 / maxval));
  return from_bytes(w, h, channels, bytes);
}

inline void encode_pnm(const Image& image, const fs::path& path) {
  std::string out = (image.channels() == 3 ? "P6\n" : "P5\n") + std::to_string(image.width()) + " " +
                    std::to_string(image.height()) + "\n255\n";
  for (float v : image.pixels()) out.push_back(static_cast<char>(to_byte(v)));
  write_text(path, out);
}

inline std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return e;
}

}  // namespace detail

/// Decodes PNG or PGM/PPM (chosen by file signature); 8-bit v maps to v/255.
inline Image load_image(const fs::path& path) {
  std::string data;
  try {
    data = read_text(path);
  } catch (const IoError&) {
    throw IoError("cannot read image " + path.string());
  }
  if (data.size() >= 8 && static_cast<unsigned char>(data[0]) == 0x89 && data.compare(1, 3, "PNG") == 0)
    return detail::decode_png(path, data);
  if (data.size() >= 2 && data[0] == 'P' && std::string_view("2356").find(data[1]) != std::string_view::npos)
    return detail::decode_pnm(path, data);
  throw IoError("unsupported image format: " + path.string());
}

/// Writes by extension: .png, .pgm/.ppm/.pnm (binary).
inline void save_image(const Image& image, const fs::path& path) {
  const auto ext = detail::lower_ext(path);
  if (ext == ".png") return detail::encode_png(image, path);
  if (ext == ".pgm" || ext == ".ppm" || ext == ".pnm") return detail::encode_pnm(image, path);
  throw IoError("unsupported image extension for " + path.string());
}

// ---------------------------------------------------------------------------
// Dataset manifests
// ---------------------------------------------------------------------------

struct ManifestRow {
  std::string path;  // relative to the manifest's directory
  int label = 0;
  std::string name;

  friend bool operator==(const ManifestRow&, const ManifestRow&) = default;
};

struct DatasetManifest {
  static constexpr int kVersion = 1;
  fs::path root;
  std::vector<ManifestRow> rows;

  int classes() const {
    int k = 0;
    for (const auto& r : rows) k = std::max(k, r.label + 1);
    return k;
  }

  // Class indices must be contiguous from 0 and every file must exist.
  void validate() const {
    const int k = classes();
    std::vector<bool> seen(static_cast<std::size_t>(k), false);
    for (const auto& r : rows) {
      if (r.label < 0) throw DataError("negative class index in manifest");
      seen[static_cast<std::size_t>(r.label)] = true;
      if (!fs::exists(root / r.path)) throw ConfigError("manifest references missing file " + (root / r.path).string());
    }
    for (int c = 0; c < k; ++c)
      if (!seen[static_cast<std::size_t>(c)]) throw DataError("manifest class indices skip class " + std::to_string(c));
  }
};

/// Format: first line "gol-manifest 1", then "path<TAB>class<TAB>name" rows;
/// '#' starts a comment line. Paths are relative to the manifest file.
inline std::string format_manifest(const DatasetManifest& m) {
  std::string out = "gol-manifest " + std::to_string(DatasetManifest::kVersion) + "\n";
  for (const auto& r : m.rows) out += r.path + "\t" + std::to_string(r.label) + "\t" + r.name + "\n";
  return out;
}

inline void write_manifest(const DatasetManifest& m, const fs::path& path) { write_text(path, format_manifest(m)); }

inline DatasetManifest read_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("manifest not found: " + path.string());
  const auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != "gol-manifest 1")
    throw DataError(path.string() + ":1: expected header 'gol-manifest 1'");
  DatasetManifest m;
  m.root = path.parent_path();
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() < 2 || f.size() > 3)
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": expected path, class, name");
    ManifestRow r;
    r.path = std::string(f[0]);
    try {
      r.label = parse_number<int>(trim(f[1]), "class index");
    } catch (const ConfigError& e) {
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    if (f.size() == 3) r.name = std::string(f[2]);
    m.rows.push_back(std::move(r));
  }
  return m;
}

struct ImageShape {
  int width = 32;
  int height = 32;
  int channels = 1;
};

inline Image normalize_image(const Image& img, const ImageShape& shape) {
  return resize(to_channels(img, shape.channels), shape.width, shape.height);
}

inline std::vector<LabeledSample> load_samples(const DatasetManifest& m, const ImageShape& shape) {
  m.validate();
  std::vector<LabeledSample> out;
  out.reserve(m.rows.size());
  for (const auto& r : m.rows) out.push_back({normalize_image(load_image(m.root / r.path), shape), r.label});
  return out;
}

inline OneShotSet load_one_shot(const fs::path& manifest, const ImageShape& shape) {
  return OneShotSet(load_samples(read_manifest(manifest), shape));
}

inline RegularizationSet load_regularization(const fs::path& manifest, const ImageShape& shape, int classes) {
  return RegularizationSet(load_samples(read_manifest(manifest), shape), classes);
}

/// Writes every sample as <dir>/class_<k>/<index>.png plus <dir>/manifest.txt.
inline DatasetManifest export_dataset(std::span<const LabeledSample> samples, const fs::path& dir,
                                      const std::vector<std::string>& class_names = {}) {
  DatasetManifest m;
  m.root = dir;
  std::map<int, int> counter;
  for (const auto& s : samples) {
    char name[32];
    std::snprintf(name, sizeof(name), "%05d.png", counter[s.label]++);
    const std::string rel = "class_" + std::to_string(s.label) + "/" + name;
    save_image(s.image, dir / rel);
    const auto k = static_cast<std::size_t>(s.label);
    m.rows.push_back({rel, s.label, k < class_names.size() ? class_names[k] : "class_" + std::to_string(s.label)});
  }
  write_manifest(m, dir / "manifest.txt");
  return m;
}

// ---------------------------------------------------------------------------
// GTSRB
// ---------------------------------------------------------------------------

inline constexpr std::string_view kGtsrbHeader = "Filename;Width;Height;Roi.X1;Roi.Y1;Roi.X2;Roi.Y2;ClassId";

struct GtsrbAnnotation {
  std::string filename;
  int width = 0;
  int height = 0;
  int x1 = 0, y1 = 0, x2 = 0, y2 = 0;  // inclusive corners
  int class_id = 0;

  friend bool operator==(const GtsrbAnnotation&, const GtsrbAnnotation&) = default;
};

inline GtsrbAnnotation parse_gtsrb_row(std::string_view line, const std::string& where) {
  const auto f = split(trim(line), ';');
  if (f.size() != 8) throw DataError(where + ": expected 8 ';'-separated fields, got " + std::to_string(f.size()));
  GtsrbAnnotation a;
  a.filename = std::string(trim(f[0]));
  int v[7];
  for (int i = 0; i < 7; ++i) {
    try {
      v[i] = parse_number<int>(trim(f[static_cast<std::size_t>(i + 1)]), "annotation field");
    } catch (const ConfigError& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  a.width = v[0], a.height = v[1], a.x1 = v[2], a.y1 = v[3], a.x2 = v[4], a.y2 = v[5], a.class_id = v[6];
  if (a.filename.empty()) throw DataError(where + ": empty filename");
  if (a.width <= 0 || a.height <= 0) throw DataError(where + ": non-positive image size");
  if (!(a.x1 >= 0 && a.y1 >= 0 && a.x1 < a.x2 && a.y1 < a.y2 && a.x2 < a.width && a.y2 < a.height))
    throw DataError(where + ": ROI outside image bounds");
  if (a.class_id < 0) throw DataError(where + ": negative class id");
  return a;
}

inline std::vector<GtsrbAnnotation> read_gtsrb_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || trim(lines[0]) != kGtsrbHeader)
    throw DataError(path.string() + ":1: expected header '" + std::string(kGtsrbHeader) + "'");
  std::vector<GtsrbAnnotation> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    out.push_back(parse_gtsrb_row(lines[i], path.string() + ":" + std::to_string(i + 1)));
  }
  return out;
}

struct GtsrbOptions {
  ImageShape shape;
  std::size_t regularization_per_class = 0;
  bool one_shot_from_first = false;  // first image of each class becomes its template
};

struct GtsrbIngest {
  std::optional<OneShotSet> one_shot;
  RegularizationSet regularization;
  DatasetManifest manifest;                 // every ingested image
  DatasetManifest templates_manifest;       // rows chosen as templates
  DatasetManifest regularization_manifest;  // rows chosen as regularization samples
};

/// Reads <root>/<class>/GT-<class>.csv for every numeric class folder, crops
/// each image to its ROI, resizes to the working shape, writes PNGs under
/// `out_dir` and a manifest at out_dir/manifest.txt.
inline GtsrbIngest ingest_gtsrb(const fs::path& root, const fs::path& out_dir, const GtsrbOptions& opt = {}) {
  if (!fs::is_directory(root)) throw ConfigError("GTSRB root is not a directory: " + root.string());
  std::vector<fs::path> class_dirs;
  for (const auto& e : fs::directory_iterator(root)) {
    const auto name = e.path().filename().string();
    if (e.is_directory() && !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) { return std::isdigit(c); }))
      class_dirs.push_back(e.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.empty()) throw DataError("no class folders under " + root.string());

  GtsrbIngest res;
  res.manifest.root = res.templates_manifest.root = res.regularization_manifest.root = out_dir;
  std::vector<LabeledSample> templates, reg;
  for (std::size_t k = 0; k < class_dirs.size(); ++k) {
    const auto& dir = class_dirs[k];
    const std::string cname = dir.filename().string();
    std::vector<fs::path> csvs;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && detail::lower_ext(e.path()) == ".csv") csvs.push_back(e.path());
    std::sort(csvs.begin(), csvs.end());
    std::vector<GtsrbAnnotation> ann;
    for (const auto& c : csvs) {
      auto rows = read_gtsrb_csv(c);
      ann.insert(ann.end(), rows.begin(), rows.end());
    }
    if (ann.empty()) throw DataError("GTSRB class folder " + cname + " has no annotated images");
    const int label = static_cast<int>(k);
    std::size_t used_reg = 0;
    for (std::size_t i = 0; i < ann.size(); ++i) {
      const auto& a = ann[i];
      const Image full = load_image(dir / a.filename);
      if (full.width() != a.width || full.height() != a.height)
        throw DataError((dir / a.filename).string() + ": size differs from its annotation");
      const Image sample = normalize_image(crop(full, a.x1, a.y1, a.x2, a.y2), opt.shape);
      const std::string rel = cname + "/" + fs::path(a.filename).replace_extension(".png").string();
      save_image(sample, out_dir / rel);
      res.manifest.rows.push_back({rel, label, cname});
      if (opt.one_shot_from_first && i == 0) {
        templates.push_back({sample, label});
        res.templates_manifest.rows.push_back(res.manifest.rows.back());
      } else if (used_reg < opt.regularization_per_class) {
        reg.push_back({sample, label});
        res.regularization_manifest.rows.push_back(res.manifest.rows.back());
        ++used_reg;
      }
    }
  }
  write_manifest(res.manifest, out_dir / "manifest.txt");
  if (opt.one_shot_from_first) write_manifest(res.templates_manifest, out_dir / "templates.txt");
  if (opt.regularization_per_class > 0) write_manifest(res.regularization_manifest, out_dir / "regularization.txt");
  const int k = static_cast<int>(class_dirs.size());
  res.regularization = RegularizationSet(std::move(reg), k);
  if (opt.one_shot_from_first) res.one_shot = OneShotSet(std::move(templates));
  return res;
}

// ---------------------------------------------------------------------------
// Archive, metrics, objective CSV
// ---------------------------------------------------------------------------

inline constexpr std::string_view kArchiveHeader = "episode\tcandidate\tseed\ttheta\tenergies\taccuracy";

/// "gol-archive 1", a column header, then one tab-separated record per line.
/// Vectors are comma-separated; reals use shortest round-trip formatting.
inline std::string format_archive(const Archive& a) {
  std::string out = "gol-archive 1\n" + std::string(kArchiveHeader) + "\n";
  for (const auto& r : a.records())
    out += std::to_string(r.episode) + "\t" + std::to_string(r.candidate) + "\t" + std::to_string(r.seed) + "\t" +
           join_doubles(r.theta) + "\t" + join_doubles(r.z.energies) + "\t" + format_double(r.z.accuracy) + "\n";
  return out;
}

inline void write_archive(const Archive& a, const fs::path& path) { write_text(path, format_archive(a)); }

inline Archive read_archive(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("archive not found: " + path.string());
  const auto lines = read_lines(path);
  if (lines.size() < 2 || lines[0] != "gol-archive 1" || lines[1] != kArchiveHeader)
    throw DataError(path.string() + ": not a gol archive");
  Archive a;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(i + 1);
    const auto f = split(lines[i], '\t');
    if (f.size() != 6) throw DataError(where + ": expected 6 fields");
    try {
      SolutionRecord r;
      r.episode = parse_number<int>(f[0], "episode");
      r.candidate = parse_number<int>(f[1], "candidate");
      r.seed = parse_number<std::uint64_t>(f[2], "seed");
      r.theta = parse_doubles(f[3], "theta");
      r.z.energies = parse_doubles(f[4], "energies");
      r.z.accuracy = parse_double(f[5], "accuracy");
      a.append(std::move(r));
    } catch (const Error& e) {
      throw DataError(where + ": " + e.what());
    }
  }
  return a;
}

inline std::string metrics_header() { return "episode\tcandidate\tenergies\taccuracy\twall_seconds\n"; }

inline std::string format_metrics_line(const CandidateMetrics& m) {
  return std::to_string(m.episode) + "\t" + std::to_string(m.candidate) + "\t" + join_doubles(m.z.energies) + "\t" +
         format_double(m.z.accuracy) + "\t" + format_double(m.wall_seconds) + "\n";
}

/// episode,candidate,J_1..J_K,accuracy,on_front
inline std::string format_objective_csv(const Archive& a) {
  if (a.empty()) throw DataError("cannot export an empty archive");
  const std::size_t k = a[0].z.energies.size();
  std::string out = "episode,candidate";
  for (std::size_t i = 1; i <= k; ++i) out += ",J_" + std::to_string(i);
  out += ",accuracy,on_front\n";
  std::vector<std::vector<double>> z;
  for (const auto& r : a.records()) z.push_back(r.z.values());
  std::vector<bool> on(a.size(), false);
  for (std::size_t i : pareto_front_indices(z)) on[i] = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& r = a[i];
    out += std::to_string(r.episode) + "," + std::to_string(r.candidate) + "," + join_doubles(r.z.energies) + "," +
           format_double(r.z.accuracy) + "," + (on[i] ? "1" : "0") + "\n";
  }
  return out;
}

inline void export_objective_csv(const Archive& a, const fs::path& path) { write_text(path, format_objective_csv(a)); }

struct ObjectiveRow {
  int episode = 0;
  int candidate = 0;
  ObjectiveVector z;
  bool on_front = false;
};

inline std::vector<ObjectiveRow> read_objective_csv(const fs::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty() || !lines[0].starts_with("episode,candidate,")) throw DataError(path.string() + ": bad header");
  const std::size_t cols = split(lines[0], ',').size();
  std::vector<ObjectiveRow> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != cols) throw DataError(path.string() + ":" + std::to_string(i + 1) + ": wrong field count");
    ObjectiveRow r;
    r.episode = parse_number<int>(f[0], "episode");
    r.candidate = parse_number<int>(f[1], "candidate");
    for (std::size_t j = 2; j + 2 < cols; ++j) r.z.energies.push_back(parse_double(f[j], "energy"));
    r.z.accuracy = parse_double(f[cols - 2], "accuracy");
    r.on_front = f[cols - 1] == "1";
    out.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model checkpoints
// ---------------------------------------------------------------------------

/// Text container:
///   gol-model 1
///   input <channels> <height> <width>
///   classes <K>
///   arch <hidden layer list>
///   params <N>
///   <N lines, one parameter each, shortest round-trip float>
inline std::string format_model(const Classifier& c) {
  const auto& a = c.architecture();
  std::string out = "gol-model 1\ninput " + std::to_string(a.channels) + " " + std::to_string(a.height) + " " +
                    std::to_string(a.width) + "\nclasses " + std::to_string(a.classes) + "\narch " + a.describe() +
                    "\nparams " + std::to_string(c.param_count()) + "\n";
  for (float p : c.params()) out += format_float(p) + "\n";
  return out;
}

inline void save_model(const Classifier& c, const fs::path& path) { write_text(path, format_model(c)); }

inline Classifier load_model(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("model not found: " + path.string());
  const auto lines = read_lines(path);
  auto field = [&](std::size_t i, std::string_view key) {
    if (i >= lines.size() || !lines[i].starts_with(std::string(key) + " "))
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": expected '" + std::string(key) + "'");
    return std::string_view(lines[i]).substr(key.size() + 1);
  };
  if (lines.empty() || lines[0] != "gol-model 1") throw DataError(path.string() + ": not a gol model");
  const auto in = split(field(1, "input"), ' ');
  if (in.size() != 3) throw DataError(path.string() + ":2: expected channels height width");
  const int k = parse_number<int>(field(2, "classes"), "classes");
  const auto arch = Architecture::parse(field(3, "arch"), parse_number<int>(in[0], "channels"),
                                        parse_number<int>(in[1], "height"), parse_number<int>(in[2], "width"), k);
  Classifier c(arch);
  const auto n = parse_number<std::size_t>(field(4, "params"), "params");
  if (n != c.param_count() || lines.size() < 5 + n)
    throw DataError(path.string() + ": parameter count does not match the architecture");
  auto p = c.params();
  for (std::size_t i = 0; i < n; ++i) p[i] = parse_number<float>(lines[5 + i], "parameter");
  c.mark_trained();
  return c;
}

// ---------------------------------------------------------------------------
// Trainer checkpoint (pairs with the archive file)
// ---------------------------------------------------------------------------

inline void write_checkpoint(const TrainerCheckpoint& cp, const fs::path& path) {
  std::string pop;
  for (std::size_t i = 0; i < cp.population.size(); ++i) pop += (i ? "," : "") + std::to_string(cp.population[i]);
  write_text(path, "gol-checkpoint 1\nconfig_hash " + std::to_string(cp.config_hash) + "\nnext_episode " +
                       std::to_string(cp.next_episode) + "\npopulation " + pop + "\nmean " + join_doubles(cp.mean) + "\n");
}

inline TrainerCheckpoint read_checkpoint(const fs::path& path) {
  if (!fs::exists(path)) throw ConfigError("checkpoint not found: " + path.string());
  const auto lines = read_lines(path);
  if (lines.size() < 5 || lines[0] != "gol-checkpoint 1") throw DataError(path.string() + ": not a gol checkpoint");
  auto value = [&](std::size_t i, std::string_view key) {
    if (!lines[i].starts_with(std::string(key) + " ") && lines[i] != key)
      throw DataError(path.string() + ":" + std::to_string(i + 1) + ": expected '" + std::string(key) + "'");
    return lines[i].size() > key.size() ? std::string_view(lines[i]).substr(key.size() + 1) : std::string_view{};
  };
  TrainerCheckpoint cp;
  cp.config_hash = parse_number<std::uint64_t>(value(1, "config_hash"), "config hash");
  cp.next_episode = parse_number<int>(value(2, "next_episode"), "next episode");
  const auto pop = value(3, "population");
  if (!trim(pop).empty())
    for (auto t : split(pop, ',')) cp.population.push_back(parse_number<std::size_t>(t, "population index"));
  cp.mean = parse_doubles(value(4, "mean"), "mean");
  return cp;
}

// ---------------------------------------------------------------------------
// Montage
// ---------------------------------------------------------------------------

/// Grid with one row per class: the template in column 0, then `per_stage`
/// samples of that class from each stage in turn.
inline Image build_montage(const OneShotSet& templates, std::span<const SyntheticDataset> stages, std::size_t per_stage) {
  if (templates.classes() == 0) throw DataError("montage needs templates");
  const Image& t0 = templates.templ(0);
  const int w = t0.width(), h = t0.height(), c = t0.channels();
  const int cols = 1 + static_cast<int>(stages.size() * per_stage);
  Image out(w * cols, h * templates.classes(), c);
  auto blit = [&](const Image& img, int col, int row) {
    const Image fit = resize(to_channels(img, c), w, h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int ch = 0; ch < c; ++ch) out.at(col * w + x, row * h + y, ch) = fit.at(x, y, ch);
  };
  for (int k = 0; k < templates.classes(); ++k) {
    blit(templates.templ(k), 0, k);
    int col = 1;
    for (const auto& stage : stages) {
      std::size_t taken = 0;
      for (const auto& s : stage.samples) {
        if (taken == per_stage) break;
        if (s.label != k) continue;
        blit(s.image, col + static_cast<int>(taken), k);
        ++taken;
      }
      col += static_cast<int>(per_stage);
    }
  }
  return out;
}

inline void export_montage(const OneShotSet& templates, std::span<const SyntheticDataset> stages, std::size_t per_stage,
                           const fs::path& path) {
  if (stages.empty() || per_stage == 0) throw DataError("montage needs at least one stage sample");
  save_image(build_montage(templates, stages, per_stage), path);
}

}  // namespace gol::io
