#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gap/raster.hpp"

namespace gap {

namespace fs = std::filesystem;

enum class Continent { Africa, Americas, Asia, Europe, Oceania };
enum class NorthSouth { GlobalNorth, GlobalSouth };
enum class WestEast { GlobalWest, GlobalEast };

std::string_view to_string(Continent c);
std::string_view to_string(NorthSouth ns);
std::string_view to_string(WestEast we);
std::optional<Continent> parse_continent(std::string_view s);
std::optional<NorthSouth> parse_north_south(std::string_view s);
std::optional<WestEast> parse_west_east(std::string_view s);

struct AttractionRecord {
  std::string id;
  std::string name;
  std::string city;
  std::string country;
  Continent continent = Continent::Europe;
  NorthSouth north_south = NorthSouth::GlobalNorth;
  WestEast west_east = WestEast::GlobalWest;
  std::uint64_t pageviews = 0;
  std::string category;
  fs::path gt_image;
  std::string short_caption;
  std::string detailed_caption;
  std::vector<fs::path> frame_refs;
  // Empty means "discover <id>.r<k>.mask.png in the features directory".
  std::vector<fs::path> masks;
};

struct BenchmarkConfig {
  static constexpr std::size_t kDefaultFrames = 5;
  static constexpr double kDefaultTau = 3000.0;
  static constexpr double kDefaultBeta = 1.5;

  std::size_t n_frames = kDefaultFrames;
  double tau = kDefaultTau;
  double beta = kDefaultBeta;
  fs::path features_dir;
  std::vector<fs::path> judge_files;
  std::vector<fs::path> quality_files;
};

struct Benchmark {
  fs::path manifest_path;
  BenchmarkConfig config;
  std::vector<AttractionRecord> attractions;
};

// Parses the JSON manifest. All relative paths are resolved against the
// manifest's directory. Throws FormatError on malformed JSON or fields and
// ValidationError on duplicate ids. File existence is checked separately by
// validate_benchmark().
Benchmark load_manifest(const fs::path& path);
Benchmark parse_manifest(std::string_view text, const fs::path& base_dir);

// Extractor naming conventions inside the features directory.
struct FeatureLayout {
  fs::path dir;

  fs::path gt_embedding(std::string_view id) const;
  fs::path frame_embedding(std::string_view id, std::size_t frame) const;
  fs::path mask(std::string_view id, std::size_t region) const;
  fs::path frame_matches(std::string_view id, std::size_t frame) const;
  fs::path self_matches(std::string_view id) const;
};

FeatureLayout feature_layout(const Benchmark& bench);

// Masks listed on the record, or discovered r0, r1, ... until the first gap.
std::vector<fs::path> mask_paths(const AttractionRecord& rec, const FeatureLayout& layout);

// ---------------------------------------------------------------------------
// Patch embeddings

struct PatchEmbeddings {
  std::size_t num_patches = 0;
  std::size_t dim = 0;
  std::size_t grid_rows = 0;
  std::size_t grid_cols = 0;
  std::vector<double> tokens;  // row-major num_patches x dim, unit rows
  fs::path source;

  std::span<const double> row(std::size_t i) const {
    return {tokens.data() + i * dim, dim};
  }
};

inline constexpr std::uint32_t kEmbeddingMagic = 0x45504147;  // "GAPE" little-endian
inline constexpr std::size_t kEmbeddingHeaderBytes = 20;

// Builds a validated embedding set, normalizing every row to unit L2 norm.
// Throws DegenerateError on a zero-norm or non-finite row, FormatError when the
// grid does not cover num_patches.
PatchEmbeddings make_embeddings(std::size_t num_patches, std::size_t dim,
                                std::size_t grid_rows, std::size_t grid_cols,
                                std::vector<double> values);

PatchEmbeddings read_embeddings(const fs::path& path);
PatchEmbeddings parse_embeddings(std::span<const std::byte> bytes);
void write_embeddings(const fs::path& path, const PatchEmbeddings& emb);
std::vector<std::byte> serialize_embeddings(const PatchEmbeddings& emb);

// ---------------------------------------------------------------------------
// Region masks

struct RegionMask {
  ImageSize size;
  std::vector<std::uint8_t> pixels;  // 0 or 1, row-major
  std::size_t area = 0;
  std::string label;

  bool contains(std::size_t x, std::size_t y) const {
    return pixels[y * size.width + x] != 0;
  }
};

// Nonzero input pixels are inside. Throws ValidationError when nothing is set.
RegionMask make_mask(ImageSize size, std::vector<std::uint8_t> pixels, std::string label);
RegionMask full_image_mask(ImageSize size);

// Throws ValidationError on zero area or when `expected` is given and differs.
RegionMask read_mask(const fs::path& path, std::optional<ImageSize> expected = std::nullopt);
void write_mask(const fs::path& path, const RegionMask& mask);

// ---------------------------------------------------------------------------
// Keypoint matches

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

struct Match {
  Point2 gt;
  Point2 frame;
  double confidence = 1.0;
};

struct MatchSet {
  std::vector<Match> pairs;
  fs::path gt_ref;
  fs::path frame_ref;
};

// One correspondence per line: `x_gt y_gt x_f y_f conf`. Blank lines and
// lines starting with '#' are skipped. Coordinates must satisfy
// 0 <= x < width and 0 <= y < height of their image.
MatchSet parse_matches(std::string_view text, ImageSize gt_size, ImageSize frame_size,
                       std::string_view source_name = "<matches>");
MatchSet read_matches(const fs::path& path, ImageSize gt_size, ImageSize frame_size);
void write_matches(const fs::path& path, const MatchSet& matches);

LuminanceRaster read_grayscale(const fs::path& path);

// ---------------------------------------------------------------------------
// Judge and quality scores

enum class JudgeSource { VLM, Human };

std::string_view to_string(JudgeSource s);

struct JudgeScores {
  std::string video_id;
  int global_alignment = 0;
  int fine_alignment = 0;
  JudgeSource source = JudgeSource::VLM;
  std::optional<std::string> annotator_id;
};

struct QualityScore {
  std::string video_id;
  double overall = 0.0;
};

// JSON arrays of objects. Out-of-range scores raise ValidationError.
std::vector<JudgeScores> parse_judge_scores(std::string_view text, std::string_view source_name);
std::vector<JudgeScores> read_judge_scores(const fs::path& path);
void write_judge_scores(const fs::path& path, std::span<const JudgeScores> scores);

std::vector<QualityScore> parse_quality_scores(std::string_view text, std::string_view source_name);
std::vector<QualityScore> read_quality_scores(const fs::path& path);
void write_quality_scores(const fs::path& path, std::span<const QualityScore> scores);

// ---------------------------------------------------------------------------
// Whole-benchmark validation

struct Violation {
  std::string subject;  // attraction id or file
  std::string message;
};

// Checks every invariant that needs the filesystem: frame count, readable
// images, and every feature artifact present for each record parses and
// matches the ground-truth dimensions. Never throws for artifact problems.
std::vector<Violation> validate_benchmark(const Benchmark& bench);

std::string read_text_file(const fs::path& path);

}  // namespace gap
