#include "gap/report.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <thread>

#include "gap/error.hpp"
#include "gap/metrics_judge.hpp"
#include "gap/score_table.hpp"

namespace gap {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// validate

ValidationOutcome run_validate(const fs::path& manifest) {
  ValidationOutcome out;
  if (!fs::is_regular_file(manifest)) {
    out.exit_code = kExitUsage;
    out.violations.push_back({manifest.string(), "cannot read manifest"});
    return out;
  }
  try {
    const Benchmark bench = load_manifest(manifest);
    out.violations = validate_benchmark(bench);
  } catch (const IoError& e) {
    out.exit_code = kExitUsage;
    out.violations.push_back({manifest.string(), e.what()});
    return out;
  } catch (const Error& e) {
    out.violations.push_back({manifest.string(), e.what()});
  }
  out.exit_code = out.violations.empty() ? kExitOk : kExitDomainFailure;
  return out;
}

// ---------------------------------------------------------------------------
// score

AttractionScores score_attraction(const AttractionRecord& rec, const FeatureLayout& layout,
                                  std::size_t n_frames, const KeypointParams& params) {
  AttractionScores out;
  if (rec.frame_refs.size() != n_frames) {
    out.errors.push_back({rec.id, "attraction",
                          "expected " + std::to_string(n_frames) + " frames, manifest lists " +
                              std::to_string(rec.frame_refs.size())});
    return out;
  }
  out.frames.resize(n_frames);
  for (std::size_t k = 0; k < n_frames; ++k) {
    out.frames[k].id = rec.id;
    out.frames[k].frame = k;
  }

  try {
    const PatchEmbeddings gt = read_embeddings(layout.gt_embedding(rec.id));
    std::vector<double> per_frame;
    for (std::size_t k = 0; k < n_frames; ++k) {
      per_frame.push_back(patch_similarity(gt, read_embeddings(layout.frame_embedding(rec.id, k))));
    }
    out.patch = video_patch_score(std::move(per_frame));
  } catch (const Error& e) {
    out.errors.push_back({rec.id, "patch_clip", e.what()});
  }

  try {
    const Raster8 gt_image = read_png(rec.gt_image);
    const ImageSize gt_size = gt_image.size;
    std::vector<RegionMask> masks;
    for (const fs::path& p : mask_paths(rec, layout)) masks.push_back(read_mask(p, gt_size));
    const auto regions = prepare_regions(to_luminance(gt_image), std::move(masks), params);
    const MatchSet self = read_matches(layout.self_matches(rec.id), gt_size, gt_size);

    std::vector<FrameAlignment> frames;
    for (std::size_t k = 0; k < n_frames; ++k) {
      const ImageSize frame_size = read_png_size(rec.frame_refs[k]);
      const MatchSet matches = read_matches(layout.frame_matches(rec.id, k), gt_size, frame_size);
      FrameEvaluation fe = evaluate_frame(regions, matches, self, params);
      FrameDetail& fd = out.frames[k];
      fd.keypoint_density = fe.alignment.density;
      fd.keypoint_geometry = fe.alignment.geometry;
      fd.keypoint_total = fe.alignment.total;
      fd.regions = fe.regions.size();
      fd.usable_regions = static_cast<std::size_t>(std::count_if(
          fe.regions.begin(), fe.regions.end(), [](const auto& r) { return r.usable(); }));
      frames.push_back(std::move(fe.alignment));
    }
    out.keypoint = video_alignment(std::move(frames));
  } catch (const Error& e) {
    out.errors.push_back({rec.id, "keypoint", e.what()});
  }

  if (out.patch) {
    for (std::size_t k = 0; k < n_frames; ++k) out.frames[k].patch_clip = out.patch->per_frame[k];
  }
  return out;
}

ScoreOutcome score_benchmark(const Benchmark& bench, const ScoreOptions& options) {
  KeypointParams params;
  params.tau = options.tau.value_or(bench.config.tau);
  params.beta = options.beta.value_or(bench.config.beta);
  const std::size_t n_frames = options.n_frames.value_or(bench.config.n_frames);
  const FeatureLayout layout = feature_layout(bench);

  std::vector<const AttractionRecord*> selected;
  const std::set<std::string> subset(options.subset.begin(), options.subset.end());
  for (const AttractionRecord& rec : bench.attractions) {
    if (subset.empty() || subset.contains(rec.id)) selected.push_back(&rec);
  }
  std::sort(selected.begin(), selected.end(),
            [](const AttractionRecord* a, const AttractionRecord* b) { return a->id < b->id; });

  std::vector<AttractionScores> results(selected.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < selected.size(); i = next++) {
      results[i] = score_attraction(*selected[i], layout, n_frames, params);
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(1, selected.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  ScoreOutcome out;
  std::map<std::string, AggregatedJudgeScore> judged;
  try {
    std::vector<JudgeScores> entries;
    std::vector<QualityScore> quality;
    for (const fs::path& p : bench.config.judge_files) {
      auto e = read_judge_scores(p);
      entries.insert(entries.end(), e.begin(), e.end());
    }
    for (const fs::path& p : bench.config.quality_files) {
      auto q = read_quality_scores(p);
      quality.insert(quality.end(), q.begin(), q.end());
    }
    judged = aggregate_all(entries, quality);
  } catch (const Error& e) {
    out.errors.push_back({"", "judge", e.what()});
  }

  for (std::size_t i = 0; i < selected.size(); ++i) {
    const AttractionRecord& rec = *selected[i];
    AttractionScores& res = results[i];
    ScoreRow row;
    row.id = rec.id;
    row.name = rec.name;
    row.city = rec.city;
    row.country = rec.country;
    row.continent = rec.continent;
    row.north_south = rec.north_south;
    row.west_east = rec.west_east;
    row.pageviews = rec.pageviews;
    row.category = rec.category;
    if (res.patch) row.patch_clip = res.patch->video;
    if (res.keypoint) row.keypoint = res.keypoint->video;
    if (auto it = judged.find(rec.id); it != judged.end()) {
      row.vlm_avg = it->second.vlm_avg;
      row.human_avg = it->second.human_avg;
      row.quality = it->second.quality;
    }
    if (row.patch_clip || row.keypoint) ++out.scored;
    out.rows.push_back(std::move(row));
    out.frames.insert(out.frames.end(), res.frames.begin(), res.frames.end());
    out.errors.insert(out.errors.end(), res.errors.begin(), res.errors.end());
  }
  return out;
}

namespace {

std::string frames_csv(const std::vector<FrameDetail>& frames) {
  CsvWriter w({"id", "frame", "patch_clip", "keypoint_density", "keypoint_geometry",
               "keypoint_total", "usable_regions", "regions"});
  for (const FrameDetail& f : frames) {
    w.add_row({f.id, std::to_string(f.frame), format_optional(f.patch_clip),
               format_optional(f.keypoint_density), format_optional(f.keypoint_geometry),
               format_optional(f.keypoint_total), std::to_string(f.usable_regions),
               std::to_string(f.regions)});
  }
  return w.str();
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
}

}  // namespace

int run_score(const ScoreOptions& options, std::ostream& log) {
  if ((options.tau && !(*options.tau > 0.0)) || (options.beta && !(*options.beta > 0.0)) ||
      (options.n_frames && *options.n_frames < 1) || options.jobs < 1) {
    log << "error: tau, beta must be > 0; n-frames and jobs must be >= 1\n";
    return kExitUsage;
  }
  Benchmark bench;
  try {
    bench = load_manifest(options.manifest);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitDomainFailure;
  }
  for (const std::string& id : options.subset) {
    const bool known = std::any_of(bench.attractions.begin(), bench.attractions.end(),
                                   [&](const AttractionRecord& r) { return r.id == id; });
    if (!known) {
      log << "error: --subset names unknown attraction '" << id << "'\n";
      return kExitUsage;
    }
  }

  const ScoreOutcome outcome = score_benchmark(bench, options);
  try {
    ensure_dir(options.out_dir);
    write_score_table(options.out_dir / "scores.csv", outcome.rows);
    std::ofstream(options.out_dir / "frames.csv", std::ios::binary) << frames_csv(outcome.frames);
    const fs::path errors_path = options.out_dir / "errors.csv";
    if (outcome.errors.empty()) {
      fs::remove(errors_path);
    } else {
      CsvWriter w({"id", "metric", "message"});
      for (const ScoreError& e : outcome.errors) w.add_row({e.id, e.metric, e.message});
      w.save(errors_path);
    }
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  log << "scored " << outcome.scored << " of " << outcome.rows.size() << " attractions";
  if (!outcome.errors.empty()) log << " (" << outcome.errors.size() << " errors, see errors.csv)";
  log << "\n";
  return outcome.scored > 0 ? kExitOk : kExitDomainFailure;
}

// ---------------------------------------------------------------------------
// analyze

double popularity_value(std::uint64_t pageviews, bool log_scale) {
  const auto v = static_cast<double>(pageviews);
  return log_scale ? std::log10(1.0 + v) : v;
}

namespace {

bool has_metric(const std::vector<ScoreRow>& rows, Metric m) {
  return std::any_of(rows.begin(), rows.end(), [m](const ScoreRow& r) { return r.metric(m); });
}

std::vector<Metric> judge_metrics(const std::vector<ScoreRow>& rows) {
  std::vector<Metric> out;
  for (Metric m : {Metric::HumanAvg, Metric::VlmAvg}) {
    if (has_metric(rows, m)) out.push_back(m);
  }
  return out;
}

std::vector<std::string> axis_labels(const std::vector<ScoreRow>& rows, GroupAxis axis) {
  std::set<std::string> labels;
  for (const ScoreRow& r : rows) {
    if (auto l = r.group_label(axis)) labels.insert(*l);
  }
  return {labels.begin(), labels.end()};
}

}  // namespace

std::string trend_csv(const std::vector<ScoreRow>& rows, bool log_popularity) {
  CsvWriter w({"metric", "n", "srcc", "srcc_p", "slope", "slope_p", "status"});
  for (Metric m : kAllMetrics) {
    if (!has_metric(rows, m)) continue;
    std::vector<double> x, y;
    for (const ScoreRow& r : rows) {
      auto v = r.metric(m);
      if (v && r.pageviews) {
        x.push_back(popularity_value(*r.pageviews, log_popularity));
        y.push_back(*v);
      }
    }
    const std::string name(to_string(m));
    if (x.size() < 3) {
      w.add_row({name, std::to_string(x.size()), "", "", "", "", "insufficient"});
      continue;
    }
    try {
      const TrendResult t = trend(x, y);
      w.add_row({name, std::to_string(t.n), format_number(t.srcc), format_number(t.srcc_p),
                 format_number(t.slope), format_number(t.slope_p), "ok"});
    } catch (const Error&) {
      w.add_row({name, std::to_string(x.size()), "", "", "", "", "degenerate"});
    }
  }
  return w.str();
}

std::string groups_csv(const std::vector<ScoreRow>& rows) {
  const auto metrics = judge_metrics(rows);
  std::vector<std::string> header = {"axis", "group"};
  for (Metric m : metrics) {
    const std::string name(to_string(m));
    for (const char* suffix : {"_n", "_mean", "_std", "_degenerate"}) header.push_back(name + suffix);
  }
  CsvWriter w(header);
  for (GroupAxis axis : kAllAxes) {
    std::vector<std::vector<GroupSummary>> per_metric;
    for (Metric m : metrics) per_metric.push_back(group_summary(rows, m, axis));
    for (const std::string& label : axis_labels(rows, axis)) {
      std::vector<std::string> fields = {std::string(to_string(axis)), label};
      bool any = false;
      for (const auto& summaries : per_metric) {
        auto it = std::find_if(summaries.begin(), summaries.end(),
                               [&](const GroupSummary& g) { return g.label == label; });
        if (it == summaries.end()) {
          fields.insert(fields.end(), {"0", "", "", ""});
        } else {
          any = true;
          fields.insert(fields.end(), {std::to_string(it->n), format_number(it->mean),
                                       format_number(it->std), it->degenerate ? "1" : "0"});
        }
      }
      if (any) w.add_row(std::move(fields));
    }
  }
  return w.str();
}

std::string equivalence_csv(const std::vector<ScoreRow>& rows, const AnalyzeOptions& options) {
  CsvWriter w({"axis", "metric", "group_a", "group_b", "n_a", "n_b", "mean_diff", "ci_low",
               "ci_high", "delta", "equivalent", "resamples", "seed"});
  for (Metric m : judge_metrics(rows)) {
    for (GroupAxis axis : kAllAxes) {
      auto groups = group_summary(rows, m, axis);
      std::erase_if(groups, [](const GroupSummary& g) { return g.n < 2; });
      // Higher mean first so reported differences are non-negative.
      std::sort(groups.begin(), groups.end(), [](const GroupSummary& a, const GroupSummary& b) {
        return a.mean != b.mean ? a.mean > b.mean : a.label < b.label;
      });
      for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
          const auto a = group_values(rows, m, axis, groups[i].label);
          const auto b = group_values(rows, m, axis, groups[j].label);
          EquivalenceResult r = bootstrap_equivalence(a, b, options.delta, options.boot_b,
                                                      options.seed, options.jobs);
          w.add_row({std::string(to_string(axis)), std::string(to_string(m)), groups[i].label,
                     groups[j].label, std::to_string(a.size()), std::to_string(b.size()),
                     format_number(r.mean_diff), format_number(r.ci_low),
                     format_number(r.ci_high), format_number(r.delta),
                     r.equivalent ? "1" : "0", std::to_string(r.resamples),
                     std::to_string(r.seed)});
        }
      }
    }
  }
  return w.str();
}

std::string correlation_csv(const std::vector<ScoreRow>& rows) {
  CsvWriter w({"metric_a", "metric_b", "n", "rho", "p", "available"});
  for (const CorrelationEntry& e : metric_correlation_matrix(rows)) {
    const bool ok = e.correlation.has_value();
    w.add_row({std::string(to_string(e.a)), std::string(to_string(e.b)), std::to_string(e.n),
               ok ? format_number(e.correlation->rho) : "",
               ok ? format_number(e.correlation->p) : "", ok ? "1" : "0"});
  }
  return w.str();
}

std::string paired_csv(const std::vector<ScoreRow>& short_rows,
                       const std::vector<ScoreRow>& detailed_rows) {
  std::map<std::string, const ScoreRow*> detailed_by_id;
  for (const ScoreRow& r : detailed_rows) detailed_by_id.emplace(r.id, &r);

  CsvWriter w({"metric", "n_pairs", "mean_short", "mean_detailed", "wilcoxon_p", "cohens_d",
               "degenerate"});
  for (Metric m : {Metric::PatchClip, Metric::Keypoint, Metric::VlmAvg, Metric::HumanAvg,
                   Metric::Quality}) {
    std::vector<double> shorts, details;
    for (const ScoreRow& s : short_rows) {
      auto it = detailed_by_id.find(s.id);
      if (it == detailed_by_id.end()) continue;
      auto vs = s.metric(m);
      auto vd = it->second->metric(m);
      if (vs && vd) {
        shorts.push_back(*vs);
        details.push_back(*vd);
      }
    }
    if (shorts.size() < 2) continue;
    const PairedComparisonResult r = paired_comparison(details, shorts);
    w.add_row({std::string(to_string(m)), std::to_string(r.n_pairs), format_number(r.mean_b),
               format_number(r.mean_a), format_number(r.wilcoxon_p),
               format_optional(r.cohens_d), r.wilcoxon_degenerate ? "1" : "0"});
  }
  return w.str();
}

int run_analyze(const AnalyzeOptions& options, std::ostream& log) {
  if (!(options.delta > 0.0) || options.boot_b < 1000 || options.jobs < 1) {
    log << "error: delta must be > 0, boot-b >= 1000, jobs >= 1\n";
    return kExitUsage;
  }
  ScoreTable table;
  std::optional<ScoreTable> detailed;
  try {
    table = read_score_table(options.scores);
    if (options.scores_detailed) detailed = read_score_table(*options.scores_detailed);
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return kExitDomainFailure;
  }
  if (table.rows.empty()) {
    log << "error: score table has no rows\n";
    return kExitDomainFailure;
  }
  if (table.missing_labels > 0) {
    log << "warning: " << table.missing_labels
        << " rows lack a grouping label and are excluded from that grouping\n";
  }

  try {
    ensure_dir(options.out_dir);
    const auto save = [&](const char* name, const std::string& text) {
      std::ofstream out(options.out_dir / name, std::ios::binary);
      if (!out) throw IoError("cannot write " + (options.out_dir / name).string());
      out << text;
    };
    save("trend.csv", trend_csv(table.rows, options.log_popularity));
    save("groups.csv", groups_csv(table.rows));
    save("equivalence.csv", equivalence_csv(table.rows, options));
    save("correlation.csv", correlation_csv(table.rows));
    const fs::path paired_path = options.out_dir / "paired.csv";
    if (detailed) {
      save("paired.csv", paired_csv(table.rows, detailed->rows));
    } else {
      fs::remove(paired_path);
    }
  } catch (const IoError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  log << "analyzed " << table.rows.size() << " rows\n";
  return kExitOk;
}

}  // namespace gap
