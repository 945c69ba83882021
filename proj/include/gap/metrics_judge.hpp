#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gap/interchange.hpp"

namespace gap {

struct AggregatedJudgeScore {
  std::string video_id;
  std::optional<double> vlm_avg;
  std::optional<double> human_avg;
  std::optional<double> quality;
};

// Aggregates the judge entries of one video. VLM: (global + fine) / 2 of the
// single VLM entry. Human: uniform mean over annotators of (global + fine) / 2.
// Absent inputs stay absent. Throws ValidationError for out-of-range scores,
// more than one VLM entry, or entries belonging to another video.
AggregatedJudgeScore aggregate_judge(std::string_view video_id, std::span<const JudgeScores> entries,
                                     std::optional<QualityScore> quality = std::nullopt);

// Groups all entries by video id and aggregates each video. Later VLM entries
// for a video replace earlier ones (re-judging). Duplicate quality entries
// raise ValidationError.
std::map<std::string, AggregatedJudgeScore> aggregate_all(std::span<const JudgeScores> entries,
                                                          std::span<const QualityScore> quality);

}  // namespace gap
