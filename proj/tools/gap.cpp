#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gap/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gap: landmark alignment metrics and geo-equity analysis"};
  app.require_subcommand(1);

  std::string validate_manifest;
  auto* validate = app.add_subcommand("validate", "Check a benchmark manifest and its artifacts");
  validate->add_option("manifest", validate_manifest, "Manifest JSON")->required();

  gap::ScoreOptions score_opts;
  std::string score_manifest, score_out;
  double tau = 0.0, beta = 0.0;
  std::size_t n_frames = 0;
  auto* score = app.add_subcommand("score", "Compute per-attraction metric scores");
  score->add_option("--manifest", score_manifest, "Manifest JSON")->required();
  score->add_option("--out", score_out, "Output directory")->required();
  score->add_option("--subset", score_opts.subset, "Attraction ids (comma separated)")
      ->delimiter(',');
  score->add_option("--jobs", score_opts.jobs, "Worker threads")->default_val(1);
  auto* tau_opt = score->add_option("--tau", tau, "Detailness scale (default from manifest)");
  auto* beta_opt = score->add_option("--beta", beta, "Density saturation (default from manifest)");
  auto* n_opt = score->add_option("--n-frames", n_frames, "Frames per video");

  gap::AnalyzeOptions analyze_opts;
  std::string scores_path, detailed_path, analyze_out;
  auto* analyze = app.add_subcommand("analyze", "Run the geo-equity statistics on a score table");
  analyze->add_option("--scores", scores_path, "Score table CSV")->required();
  auto* detailed_opt =
      analyze->add_option("--scores-detailed", detailed_path, "Detailed-prompt score table");
  analyze->add_option("--out", analyze_out, "Output directory")->required();
  analyze->add_option("--delta", analyze_opts.delta, "Equivalence margin")->default_val(1.0);
  analyze->add_option("--boot-b", analyze_opts.boot_b, "Bootstrap resamples")->default_val(10000);
  analyze->add_option("--seed", analyze_opts.seed, "Bootstrap seed")->default_val(0);
  analyze->add_flag("--log-popularity", analyze_opts.log_popularity,
                    "Use log10(1 + pageviews) as the popularity variable");
  analyze->add_option("--jobs", analyze_opts.jobs, "Bootstrap worker threads")->default_val(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gap::kExitUsage;
  }

  if (*validate) {
    const gap::ValidationOutcome out = gap::run_validate(validate_manifest);
    for (const gap::Violation& v : out.violations) {
      std::cout << v.subject << ": " << v.message << "\n";
    }
    if (out.exit_code == gap::kExitOk) std::cout << "ok\n";
    return out.exit_code;
  }
  if (*score) {
    score_opts.manifest = score_manifest;
    score_opts.out_dir = score_out;
    if (*tau_opt) score_opts.tau = tau;
    if (*beta_opt) score_opts.beta = beta;
    if (*n_opt) score_opts.n_frames = n_frames;
    return gap::run_score(score_opts, std::cerr);
  }
  analyze_opts.scores = scores_path;
  if (*detailed_opt) analyze_opts.scores_detailed = detailed_path;
  analyze_opts.out_dir = analyze_out;
  return gap::run_analyze(analyze_opts, std::cerr);
}
