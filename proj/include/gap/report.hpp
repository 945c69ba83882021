#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gap/geo_stats.hpp"
#include "gap/interchange.hpp"
#include "gap/metrics_keypoint.hpp"
#include "gap/metrics_patch.hpp"

namespace gap {

// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitDomainFailure = 1, kExitUsage = 2 };

// ---------------------------------------------------------------------------
// validate

struct ValidationOutcome {
  int exit_code = kExitOk;
  std::vector<Violation> violations;
};

// Loads and validates a manifest. Unreadable path -> kExitUsage; any format or
// invariant problem is reported as a violation with kExitDomainFailure.
ValidationOutcome run_validate(const std::filesystem::path& manifest);

// ---------------------------------------------------------------------------
// score

struct ScoreOptions {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;
  std::vector<std::string> subset;  // empty = all attractions
  std::size_t jobs = 1;
  std::optional<double> tau;
  std::optional<double> beta;
  std::optional<std::size_t> n_frames;
};

struct ScoreError {
  std::string id;
  std::string metric;  // "patch_clip", "keypoint", "judge", or "attraction"
  std::string message;
};

struct FrameDetail {
  std::string id;
  std::size_t frame = 0;
  std::optional<double> patch_clip;
  std::optional<double> keypoint_density;
  std::optional<double> keypoint_geometry;
  std::optional<double> keypoint_total;
  std::size_t usable_regions = 0;
  std::size_t regions = 0;
};

struct AttractionScores {
  std::optional<PatchScore> patch;
  std::optional<KeypointVideoScore> keypoint;
  std::vector<FrameDetail> frames;
  std::vector<ScoreError> errors;
};

// Scores one attraction. Failures of one metric leave that metric absent and
// add a ScoreError; the other metric is still computed.
AttractionScores score_attraction(const AttractionRecord& rec, const FeatureLayout& layout,
                                  std::size_t n_frames, const KeypointParams& params);

struct ScoreOutcome {
  std::vector<ScoreRow> rows;  // sorted by id
  std::vector<FrameDetail> frames;
  std::vector<ScoreError> errors;
  std::size_t scored = 0;  // rows with at least one metric
};

// Scores every selected attraction on a pool of `options.jobs` workers and
// joins judge and quality files named in the manifest config.
ScoreOutcome score_benchmark(const Benchmark& bench, const ScoreOptions& options);

// Writes scores.csv, frames.csv, and errors.csv (only when errors exist).
// Returns kExitOk when at least one row was scored.
int run_score(const ScoreOptions& options, std::ostream& log);

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::filesystem::path scores;
  std::optional<std::filesystem::path> scores_detailed;
  std::filesystem::path out_dir;
  double delta = kDefaultEquivalenceDelta;
  std::size_t boot_b = kDefaultBootstrapResamples;
  std::uint64_t seed = 0;
  bool log_popularity = false;
  std::size_t jobs = 1;
};

// log10(1 + pageviews) when `log_scale`, raw counts otherwise.
double popularity_value(std::uint64_t pageviews, bool log_scale);

// Writes trend.csv, groups.csv, equivalence.csv, correlation.csv and, with a
// detailed-prompt table, paired.csv.
int run_analyze(const AnalyzeOptions& options, std::ostream& log);

// Individual report tables, exposed for tests.
std::string trend_csv(const std::vector<ScoreRow>& rows, bool log_popularity);
std::string groups_csv(const std::vector<ScoreRow>& rows);
std::string equivalence_csv(const std::vector<ScoreRow>& rows, const AnalyzeOptions& options);
std::string correlation_csv(const std::vector<ScoreRow>& rows);
std::string paired_csv(const std::vector<ScoreRow>& short_rows,
                       const std::vector<ScoreRow>& detailed_rows);

}  // namespace gap
