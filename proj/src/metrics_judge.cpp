#include "gap/metrics_judge.hpp"

#include "gap/error.hpp"

namespace gap {

namespace {

void check_range(const JudgeScores& s) {
  const auto ok = [](int v) { return v >= 0 && v <= 5; };
  if (!ok(s.global_alignment) || !ok(s.fine_alignment)) {
    throw ValidationError("judge score for '" + s.video_id + "' outside {0..5}");
  }
}

double entry_mean(const JudgeScores& s) {
  return (s.global_alignment + s.fine_alignment) / 2.0;
}

}  // namespace

AggregatedJudgeScore aggregate_judge(std::string_view video_id, std::span<const JudgeScores> entries,
                                     std::optional<QualityScore> quality) {
  AggregatedJudgeScore out;
  out.video_id = video_id;
  double human_sum = 0.0;
  std::size_t human_count = 0;
  for (const JudgeScores& s : entries) {
    if (s.video_id != video_id) {
      throw ValidationError("judge entry for '" + s.video_id + "' passed for video '" +
                            std::string(video_id) + "'");
    }
    check_range(s);
    if (s.source == JudgeSource::VLM) {
      if (out.vlm_avg) throw ValidationError("duplicate VLM entry for '" + s.video_id + "'");
      out.vlm_avg = entry_mean(s);
    } else {
      human_sum += entry_mean(s);
      ++human_count;
    }
  }
  if (human_count > 0) out.human_avg = human_sum / static_cast<double>(human_count);
  if (quality) {
    if (quality->video_id != video_id) {
      throw ValidationError("quality entry for '" + quality->video_id + "' passed for video '" +
                            std::string(video_id) + "'");
    }
    if (!(quality->overall >= 0.0 && quality->overall <= 5.0)) {
      throw ValidationError("quality score for '" + quality->video_id + "' outside [0,5]");
    }
    out.quality = quality->overall;
  }
  return out;
}

std::map<std::string, AggregatedJudgeScore> aggregate_all(std::span<const JudgeScores> entries,
                                                          std::span<const QualityScore> quality) {
  std::map<std::string, std::vector<JudgeScores>> by_video;
  std::map<std::string, std::size_t> latest_vlm;
  for (const JudgeScores& s : entries) {
    auto& list = by_video[s.video_id];
    if (s.source == JudgeSource::VLM) {
      if (auto it = latest_vlm.find(s.video_id); it != latest_vlm.end()) {
        list[it->second] = s;
        continue;
      }
      latest_vlm[s.video_id] = list.size();
    }
    list.push_back(s);
  }
  std::map<std::string, QualityScore> q_by_video;
  for (const QualityScore& q : quality) {
    if (!q_by_video.emplace(q.video_id, q).second) {
      throw ValidationError("duplicate quality entry for '" + q.video_id + "'");
    }
    by_video.try_emplace(q.video_id);
  }

  std::map<std::string, AggregatedJudgeScore> out;
  for (const auto& [id, list] : by_video) {
    std::optional<QualityScore> q;
    if (auto it = q_by_video.find(id); it != q_by_video.end()) q = it->second;
    out.emplace(id, aggregate_judge(id, list, q));
  }
  return out;
}

}  // namespace gap
