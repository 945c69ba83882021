#include "gap/interchange.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "gap/error.hpp"

namespace gap {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kContinentNames = {"Africa", "Americas", "Asia",
                                                             "Europe", "Oceania"};

std::string field_path(std::string_view parent, std::string_view key) {
  return std::string(parent) + "." + std::string(key);
}

const json& require(const json& obj, std::string_view parent, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw FormatError(field_path(parent, key) + ": missing");
  return *it;
}

std::string get_string(const json& obj, std::string_view parent, const char* key) {
  const json& v = require(obj, parent, key);
  if (!v.is_string()) throw FormatError(field_path(parent, key) + ": expected string");
  return v.get<std::string>();
}

std::string get_string_or(const json& obj, std::string_view parent, const char* key,
                          std::string fallback) {
  if (!obj.contains(key)) return fallback;
  return get_string(obj, parent, key);
}

double get_positive(const json& obj, std::string_view parent, const char* key, double fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) throw FormatError(field_path(parent, key) + ": expected number");
  const double v = it->get<double>();
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw FormatError(field_path(parent, key) + ": must be a positive finite number");
  }
  return v;
}

std::vector<fs::path> get_paths(const json& obj, std::string_view parent, const char* key,
                                const fs::path& base) {
  std::vector<fs::path> out;
  auto it = obj.find(key);
  if (it == obj.end()) return out;
  if (!it->is_array()) throw FormatError(field_path(parent, key) + ": expected array");
  for (std::size_t i = 0; i < it->size(); ++i) {
    const json& v = (*it)[i];
    if (!v.is_string()) {
      throw FormatError(field_path(parent, key) + "[" + std::to_string(i) +
                        "]: expected string path");
    }
    out.push_back(base / v.get<std::string>());
  }
  return out;
}

AttractionRecord parse_record(const json& obj, std::size_t index, const fs::path& base) {
  const std::string where = "attractions[" + std::to_string(index) + "]";
  if (!obj.is_object()) throw FormatError(where + ": expected object");

  AttractionRecord rec;
  rec.id = get_string(obj, where, "id");
  if (rec.id.empty()) throw FormatError(field_path(where, "id") + ": must not be empty");
  rec.name = get_string(obj, where, "name");
  rec.city = get_string(obj, where, "city");
  rec.country = get_string(obj, where, "country");

  const std::string continent = get_string(obj, where, "continent");
  auto c = parse_continent(continent);
  if (!c) throw FormatError(field_path(where, "continent") + ": unknown value '" + continent + "'");
  rec.continent = *c;
  const std::string ns = get_string(obj, where, "north_south");
  auto n = parse_north_south(ns);
  if (!n) throw FormatError(field_path(where, "north_south") + ": unknown value '" + ns + "'");
  rec.north_south = *n;
  const std::string we = get_string(obj, where, "west_east");
  auto w = parse_west_east(we);
  if (!w) throw FormatError(field_path(where, "west_east") + ": unknown value '" + we + "'");
  rec.west_east = *w;

  const json& pv = require(obj, where, "pageviews");
  if (!pv.is_number_integer() || (pv.is_number_integer() && !pv.is_number_unsigned() &&
                                  pv.get<std::int64_t>() < 0)) {
    throw FormatError(field_path(where, "pageviews") + ": expected non-negative integer");
  }
  rec.pageviews = pv.get<std::uint64_t>();

  rec.category = get_string_or(obj, where, "category", "");
  rec.gt_image = base / get_string(obj, where, "gt_image");
  rec.short_caption = get_string_or(obj, where, "short_caption", "");
  rec.detailed_caption = get_string_or(obj, where, "detailed_caption", "");
  require(obj, where, "frame_refs");
  rec.frame_refs = get_paths(obj, where, "frame_refs", base);
  rec.masks = get_paths(obj, where, "masks", base);
  return rec;
}

std::vector<char> read_binary(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_u32_le(std::span<const std::byte> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    v |= static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(bytes[offset + i])) << (8 * i);
  }
  return v;
}

void append_u32_le(std::vector<std::byte>& out, std::uint32_t v) {
  for (std::size_t i = 0; i < 4; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFF));
}

bool parse_double(std::string_view token, double& out) {
  const char* first = token.data();
  const char* last = first + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json parse_json(std::string_view text, std::string_view source_name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(source_name) + ": " + e.what());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Continent c) { return kContinentNames[static_cast<std::size_t>(c)]; }

std::string_view to_string(NorthSouth ns) {
  return ns == NorthSouth::GlobalNorth ? "GlobalNorth" : "GlobalSouth";
}

std::string_view to_string(WestEast we) {
  return we == WestEast::GlobalWest ? "GlobalWest" : "GlobalEast";
}

std::string_view to_string(JudgeSource s) { return s == JudgeSource::VLM ? "VLM" : "Human"; }

std::optional<Continent> parse_continent(std::string_view s) {
  for (std::size_t i = 0; i < kContinentNames.size(); ++i) {
    if (kContinentNames[i] == s) return static_cast<Continent>(i);
  }
  return std::nullopt;
}

std::optional<NorthSouth> parse_north_south(std::string_view s) {
  if (s == "GlobalNorth" || s == "Global North" || s == "GN") return NorthSouth::GlobalNorth;
  if (s == "GlobalSouth" || s == "Global South" || s == "GS") return NorthSouth::GlobalSouth;
  return std::nullopt;
}

std::optional<WestEast> parse_west_east(std::string_view s) {
  if (s == "GlobalWest" || s == "Global West" || s == "GW") return WestEast::GlobalWest;
  if (s == "GlobalEast" || s == "Global East" || s == "GE") return WestEast::GlobalEast;
  return std::nullopt;
}

std::string read_text_file(const fs::path& path) {
  auto bytes = read_binary(path);
  return {bytes.begin(), bytes.end()};
}

// ---------------------------------------------------------------------------
// Manifest

Benchmark parse_manifest(std::string_view text, const fs::path& base_dir) {
  const json root = parse_json(text, "manifest");
  if (!root.is_object()) throw FormatError("manifest: top level must be an object");

  Benchmark bench;
  BenchmarkConfig& cfg = bench.config;
  cfg.features_dir = base_dir / "features";
  if (auto it = root.find("config"); it != root.end()) {
    const json& c = *it;
    if (!c.is_object()) throw FormatError("config: expected object");
    if (auto n = c.find("n_frames"); n != c.end()) {
      if (!n->is_number_integer() || n->get<std::int64_t>() < 1) {
        throw FormatError("config.n_frames: expected integer >= 1");
      }
      cfg.n_frames = n->get<std::size_t>();
    }
    cfg.tau = get_positive(c, "config", "tau", BenchmarkConfig::kDefaultTau);
    cfg.beta = get_positive(c, "config", "beta", BenchmarkConfig::kDefaultBeta);
    if (c.contains("features_dir")) {
      cfg.features_dir = base_dir / get_string(c, "config", "features_dir");
    }
    cfg.judge_files = get_paths(c, "config", "judge_files", base_dir);
    cfg.quality_files = get_paths(c, "config", "quality_files", base_dir);
  }

  auto it = root.find("attractions");
  if (it == root.end() || !it->is_array()) throw FormatError("attractions: expected array");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < it->size(); ++i) {
    AttractionRecord rec = parse_record((*it)[i], i, base_dir);
    if (!seen.insert(rec.id).second) {
      throw ValidationError("attractions[" + std::to_string(i) + "].id: duplicate id '" + rec.id +
                            "'");
    }
    bench.attractions.push_back(std::move(rec));
  }
  return bench;
}

Benchmark load_manifest(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("cannot read manifest " + path.string());
  Benchmark bench = parse_manifest(read_text_file(path), path.parent_path());
  bench.manifest_path = path;
  return bench;
}

fs::path FeatureLayout::gt_embedding(std::string_view id) const {
  return dir / (std::string(id) + ".gt.emb");
}

fs::path FeatureLayout::frame_embedding(std::string_view id, std::size_t frame) const {
  return dir / (std::string(id) + ".f" + std::to_string(frame) + ".emb");
}

fs::path FeatureLayout::mask(std::string_view id, std::size_t region) const {
  return dir / (std::string(id) + ".r" + std::to_string(region) + ".mask.png");
}

fs::path FeatureLayout::frame_matches(std::string_view id, std::size_t frame) const {
  return dir / (std::string(id) + ".f" + std::to_string(frame) + ".matches");
}

fs::path FeatureLayout::self_matches(std::string_view id) const {
  return dir / (std::string(id) + ".self.matches");
}

FeatureLayout feature_layout(const Benchmark& bench) { return {bench.config.features_dir}; }

std::vector<fs::path> mask_paths(const AttractionRecord& rec, const FeatureLayout& layout) {
  if (!rec.masks.empty()) return rec.masks;
  std::vector<fs::path> out;
  for (std::size_t k = 0;; ++k) {
    fs::path p = layout.mask(rec.id, k);
    if (!fs::exists(p)) break;
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings

PatchEmbeddings make_embeddings(std::size_t num_patches, std::size_t dim, std::size_t grid_rows,
                                std::size_t grid_cols, std::vector<double> values) {
  if (num_patches == 0 || dim == 0) throw FormatError("embeddings: n and d must be >= 1");
  if (grid_rows * grid_cols != num_patches) {
    throw FormatError("embeddings: grid " + std::to_string(grid_rows) + "x" +
                      std::to_string(grid_cols) + " does not cover " +
                      std::to_string(num_patches) + " patches");
  }
  if (values.size() != num_patches * dim) {
    throw FormatError("embeddings: expected " + std::to_string(num_patches * dim) +
                      " values, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < num_patches; ++i) {
    double sq = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double v = values[i * dim + k];
      if (!std::isfinite(v)) {
        throw DegenerateError("embeddings: row " + std::to_string(i) + " has a non-finite value");
      }
      sq += v * v;
    }
    const double norm = std::sqrt(sq);
    if (norm == 0.0) throw DegenerateError("embeddings: row " + std::to_string(i) + " has zero norm");
    for (std::size_t k = 0; k < dim; ++k) values[i * dim + k] /= norm;
  }
  PatchEmbeddings out;
  out.num_patches = num_patches;
  out.dim = dim;
  out.grid_rows = grid_rows;
  out.grid_cols = grid_cols;
  out.tokens = std::move(values);
  return out;
}

PatchEmbeddings parse_embeddings(std::span<const std::byte> bytes) {
  if (bytes.size() < kEmbeddingHeaderBytes) throw FormatError("embeddings: truncated header");
  if (read_u32_le(bytes, 0) != kEmbeddingMagic) throw FormatError("embeddings: bad magic");
  const std::size_t n = read_u32_le(bytes, 4);
  const std::size_t d = read_u32_le(bytes, 8);
  const std::size_t rows = read_u32_le(bytes, 12);
  const std::size_t cols = read_u32_le(bytes, 16);
  const std::size_t payload = bytes.size() - kEmbeddingHeaderBytes;
  if (payload != n * d * 4) {
    throw FormatError("embeddings: header declares " + std::to_string(n) + "x" +
                      std::to_string(d) + " floats but payload holds " +
                      std::to_string(payload / 4));
  }
  std::vector<double> values(n * d);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(read_u32_le(bytes, kEmbeddingHeaderBytes + 4 * i));
  }
  return make_embeddings(n, d, rows, cols, std::move(values));
}

PatchEmbeddings read_embeddings(const fs::path& path) {
  const auto raw = read_binary(path);
  try {
    PatchEmbeddings emb = parse_embeddings(std::as_bytes(std::span(raw)));
    emb.source = path;
    return emb;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  } catch (const DegenerateError& e) {
    throw DegenerateError(path.string() + ": " + e.what());
  }
}

std::vector<std::byte> serialize_embeddings(const PatchEmbeddings& emb) {
  std::vector<std::byte> out;
  out.reserve(kEmbeddingHeaderBytes + emb.tokens.size() * 4);
  append_u32_le(out, kEmbeddingMagic);
  append_u32_le(out, static_cast<std::uint32_t>(emb.num_patches));
  append_u32_le(out, static_cast<std::uint32_t>(emb.dim));
  append_u32_le(out, static_cast<std::uint32_t>(emb.grid_rows));
  append_u32_le(out, static_cast<std::uint32_t>(emb.grid_cols));
  for (double v : emb.tokens) append_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

void write_embeddings(const fs::path& path, const PatchEmbeddings& emb) {
  const auto bytes = serialize_embeddings(emb);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// ---------------------------------------------------------------------------
// Masks

RegionMask make_mask(ImageSize size, std::vector<std::uint8_t> pixels, std::string label) {
  if (pixels.size() != size.width * size.height) {
    throw FormatError("mask: pixel count does not match dimensions");
  }
  RegionMask m;
  m.size = size;
  m.label = std::move(label);
  for (auto& p : pixels) p = p != 0 ? 1 : 0;
  m.area = static_cast<std::size_t>(std::count(pixels.begin(), pixels.end(), 1));
  if (m.area == 0) throw ValidationError("mask '" + m.label + "': zero area");
  m.pixels = std::move(pixels);
  return m;
}

RegionMask full_image_mask(ImageSize size) {
  return make_mask(size, std::vector<std::uint8_t>(size.width * size.height, 1), "full-image");
}

RegionMask read_mask(const fs::path& path, std::optional<ImageSize> expected) {
  Raster8 img = read_png(path);
  if (img.channels != 1) throw FormatError(path.string() + ": mask must be single-channel");
  if (expected && img.size != *expected) {
    throw ValidationError(path.string() + ": mask is " + std::to_string(img.size.width) + "x" +
                          std::to_string(img.size.height) + ", ground truth is " +
                          std::to_string(expected->width) + "x" +
                          std::to_string(expected->height));
  }
  std::string label = path.filename().string();
  try {
    return make_mask(img.size, std::move(img.data), std::move(label));
  } catch (const ValidationError&) {
    throw ValidationError(path.string() + ": zero-area mask");
  }
}

void write_mask(const fs::path& path, const RegionMask& mask) {
  Raster8 img;
  img.size = mask.size;
  img.channels = 1;
  img.data.resize(mask.pixels.size());
  std::transform(mask.pixels.begin(), mask.pixels.end(), img.data.begin(),
                 [](std::uint8_t p) { return static_cast<std::uint8_t>(p ? 255 : 0); });
  write_png(path, img);
}

// ---------------------------------------------------------------------------
// Matches

MatchSet parse_matches(std::string_view text, ImageSize gt_size, ImageSize frame_size,
                       std::string_view source_name) {
  MatchSet set;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  const auto where = [&] { return std::string(source_name) + ":" + std::to_string(line_no); };
  const auto inside = [](const Point2& p, ImageSize s) {
    return p.x >= 0.0 && p.y >= 0.0 && p.x < static_cast<double>(s.width) &&
           p.y < static_cast<double>(s.height);
  };
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::array<double, 5> v{};
    std::size_t count = 0;
    std::size_t i = 0;
    bool comment = false;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      if (count == 0 && line[i] == '#') {
        comment = true;
        break;
      }
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      if (count == v.size()) throw FormatError(where() + ": more than 5 fields");
      if (!parse_double(line.substr(i, j - i), v[count])) {
        throw FormatError(where() + ": not a finite number '" + std::string(line.substr(i, j - i)) +
                          "'");
      }
      ++count;
      i = j;
    }
    if (comment || count == 0) continue;
    if (count != 5) throw FormatError(where() + ": expected 5 fields, got " + std::to_string(count));

    Match m{{v[0], v[1]}, {v[2], v[3]}, v[4]};
    if (!inside(m.gt, gt_size)) {
      throw ValidationError(where() + ": gt keypoint out of bounds");
    }
    if (!inside(m.frame, frame_size)) {
      throw ValidationError(where() + ": frame keypoint out of bounds");
    }
    if (m.confidence < 0.0 || m.confidence > 1.0) {
      throw ValidationError(where() + ": confidence outside [0,1]");
    }
    set.pairs.push_back(m);
  }
  return set;
}

MatchSet read_matches(const fs::path& path, ImageSize gt_size, ImageSize frame_size) {
  MatchSet set = parse_matches(read_text_file(path), gt_size, frame_size, path.string());
  set.frame_ref = path;
  return set;
}

void write_matches(const fs::path& path, const MatchSet& matches) {
  std::string text;
  std::array<char, 160> buf{};
  for (const Match& m : matches.pairs) {
    const int len = std::snprintf(buf.data(), buf.size(), "%.17g %.17g %.17g %.17g %.17g\n",
                                  m.gt.x, m.gt.y, m.frame.x, m.frame.y, m.confidence);
    text.append(buf.data(), static_cast<std::size_t>(len));
  }
  write_text_file(path, text);
}

LuminanceRaster read_grayscale(const fs::path& path) { return to_luminance(read_png(path)); }

// ---------------------------------------------------------------------------
// Judge / quality

namespace {

int get_score(const json& obj, const std::string& where, const char* key) {
  const json& v = require(obj, where, key);
  if (!v.is_number_integer()) throw FormatError(field_path(where, key) + ": expected integer");
  const auto s = v.get<std::int64_t>();
  if (s < 0 || s > 5) {
    throw ValidationError(field_path(where, key) + ": score " + std::to_string(s) +
                          " outside {0..5}");
  }
  return static_cast<int>(s);
}

}  // namespace

std::vector<JudgeScores> parse_judge_scores(std::string_view text, std::string_view source_name) {
  const json root = parse_json(text, source_name);
  if (!root.is_array()) throw FormatError(std::string(source_name) + ": expected array");
  std::vector<JudgeScores> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string where = std::string(source_name) + "[" + std::to_string(i) + "]";
    const json& o = root[i];
    if (!o.is_object()) throw FormatError(where + ": expected object");
    JudgeScores s;
    s.video_id = get_string(o, where, "video_id");
    s.global_alignment = get_score(o, where, "global_alignment");
    s.fine_alignment = get_score(o, where, "fine_alignment");
    const std::string src = get_string(o, where, "source");
    if (src == "VLM") {
      s.source = JudgeSource::VLM;
    } else if (src == "Human") {
      s.source = JudgeSource::Human;
    } else {
      throw FormatError(field_path(where, "source") + ": expected VLM or Human");
    }
    if (o.contains("annotator_id") && !o["annotator_id"].is_null()) {
      s.annotator_id = get_string(o, where, "annotator_id");
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<JudgeScores> read_judge_scores(const fs::path& path) {
  return parse_judge_scores(read_text_file(path), path.string());
}

void write_judge_scores(const fs::path& path, std::span<const JudgeScores> scores) {
  json root = json::array();
  for (const auto& s : scores) {
    json o = {{"video_id", s.video_id},
              {"global_alignment", s.global_alignment},
              {"fine_alignment", s.fine_alignment},
              {"source", std::string(to_string(s.source))}};
    if (s.annotator_id) o["annotator_id"] = *s.annotator_id;
    root.push_back(std::move(o));
  }
  write_text_file(path, root.dump(2) + "\n");
}

std::vector<QualityScore> parse_quality_scores(std::string_view text,
                                               std::string_view source_name) {
  const json root = parse_json(text, source_name);
  if (!root.is_array()) throw FormatError(std::string(source_name) + ": expected array");
  std::vector<QualityScore> out;
  for (std::size_t i = 0; i < root.size(); ++i) {
    const std::string where = std::string(source_name) + "[" + std::to_string(i) + "]";
    const json& o = root[i];
    if (!o.is_object()) throw FormatError(where + ": expected object");
    QualityScore q;
    q.video_id = get_string(o, where, "video_id");
    const json& v = require(o, where, "overall");
    if (!v.is_number()) throw FormatError(field_path(where, "overall") + ": expected number");
    q.overall = v.get<double>();
    if (!(q.overall >= 0.0 && q.overall <= 5.0)) {
      throw ValidationError(field_path(where, "overall") + ": outside [0,5]");
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<QualityScore> read_quality_scores(const fs::path& path) {
  return parse_quality_scores(read_text_file(path), path.string());
}

void write_quality_scores(const fs::path& path, std::span<const QualityScore> scores) {
  json root = json::array();
  for (const auto& q : scores) root.push_back({{"video_id", q.video_id}, {"overall", q.overall}});
  write_text_file(path, root.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Validation

std::vector<Violation> validate_benchmark(const Benchmark& bench) {
  std::vector<Violation> out;
  const FeatureLayout layout = feature_layout(bench);
  std::optional<std::size_t> bench_dim;

  const auto check = [&](const std::string& subject, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      out.push_back({subject, e.what()});
    }
  };
  const auto require_file = [&](const std::string& subject, const fs::path& p) {
    if (!fs::is_regular_file(p)) {
      out.push_back({subject, "unresolvable reference: " + p.string()});
      return false;
    }
    return true;
  };
  const auto check_embedding = [&](const std::string& subject, const fs::path& p) {
    if (!require_file(subject, p)) return;
    check(subject, [&] {
      PatchEmbeddings e = read_embeddings(p);
      if (!bench_dim) bench_dim = e.dim;
      if (e.dim != *bench_dim) {
        throw ValidationError(p.string() + ": embedding dim " + std::to_string(e.dim) +
                              " differs from benchmark dim " + std::to_string(*bench_dim));
      }
    });
  };

  for (const AttractionRecord& rec : bench.attractions) {
    const std::string& id = rec.id;
    if (rec.frame_refs.size() != bench.config.n_frames) {
      out.push_back({id, "expected " + std::to_string(bench.config.n_frames) + " frame_refs, got " +
                             std::to_string(rec.frame_refs.size())});
    }

    std::optional<ImageSize> gt_size;
    if (require_file(id, rec.gt_image)) {
      check(id, [&] { gt_size = read_png_size(rec.gt_image); });
    }
    std::vector<std::optional<ImageSize>> frame_sizes(rec.frame_refs.size());
    for (std::size_t k = 0; k < rec.frame_refs.size(); ++k) {
      if (require_file(id, rec.frame_refs[k])) {
        check(id, [&] { frame_sizes[k] = read_png_size(rec.frame_refs[k]); });
      }
    }

    check_embedding(id, layout.gt_embedding(id));
    for (std::size_t k = 0; k < rec.frame_refs.size(); ++k) {
      check_embedding(id, layout.frame_embedding(id, k));
    }

    for (const fs::path& mp : mask_paths(rec, layout)) {
      if (require_file(id, mp) && gt_size) check(id, [&] { read_mask(mp, gt_size); });
    }

    if (gt_size) {
      const fs::path self = layout.self_matches(id);
      if (require_file(id, self)) check(id, [&] { read_matches(self, *gt_size, *gt_size); });
      for (std::size_t k = 0; k < rec.frame_refs.size(); ++k) {
        const fs::path mp = layout.frame_matches(id, k);
        if (require_file(id, mp) && frame_sizes[k]) {
          check(id, [&] { read_matches(mp, *gt_size, *frame_sizes[k]); });
        }
      }
    }
  }

  for (const fs::path& p : bench.config.judge_files) {
    if (require_file(p.string(), p)) check(p.string(), [&] { read_judge_scores(p); });
  }
  for (const fs::path& p : bench.config.quality_files) {
    if (require_file(p.string(), p)) check(p.string(), [&] { read_quality_scores(p); });
  }
  return out;
}

}  // namespace gap
