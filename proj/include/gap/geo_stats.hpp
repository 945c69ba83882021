#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gap/interchange.hpp"

namespace gap {

// ---------------------------------------------------------------------------
// Score table rows

enum class Metric { Quality, PatchClip, Keypoint, VlmAvg, HumanAvg };

inline constexpr std::array<Metric, 5> kAllMetrics = {Metric::Quality, Metric::PatchClip,
                                                      Metric::Keypoint, Metric::VlmAvg,
                                                      Metric::HumanAvg};

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view s);

enum class GroupAxis { Continent, NorthSouth, WestEast };

inline constexpr std::array<GroupAxis, 3> kAllAxes = {GroupAxis::Continent, GroupAxis::NorthSouth,
                                                      GroupAxis::WestEast};

std::string_view to_string(GroupAxis a);

struct ScoreRow {
  std::string id;
  std::string name;
  std::string city;
  std::string country;
  std::optional<Continent> continent;
  std::optional<NorthSouth> north_south;
  std::optional<WestEast> west_east;
  std::optional<std::uint64_t> pageviews;
  std::string category;

  std::optional<double> patch_clip;
  std::optional<double> keypoint;
  std::optional<double> vlm_avg;
  std::optional<double> human_avg;
  std::optional<double> quality;

  std::optional<double> metric(Metric m) const;
  std::optional<std::string> group_label(GroupAxis axis) const;
};

// ---------------------------------------------------------------------------
// Correlation and trend

// Average ranks (1-based), ties share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> values);

struct Correlation {
  double rho = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

// Spearman rank correlation; two-sided p from Student-t with n-2 df, p = 0 at
// |rho| = 1. Throws ContractError for n < 3 or unequal lengths and
// DegenerateError when either input has zero rank variance.
Correlation spearman(std::span<const double> x, std::span<const double> y);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double p = 1.0;  // two-sided, t-test on the slope with n-2 df
  std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope * x. Throws ContractError for
// n < 3 or constant x. A perfect fit with nonzero slope reports p = 0; a
// perfect fit with zero slope reports p = 1.
SlopeFit ols_trend(std::span<const double> x, std::span<const double> y);

struct TrendResult {
  double srcc = 0.0;
  double srcc_p = 1.0;
  double slope = 0.0;
  double slope_p = 1.0;
  std::size_t n = 0;
};

TrendResult trend(std::span<const double> x, std::span<const double> y);

// ---------------------------------------------------------------------------
// Groups

struct GroupSummary {
  std::string label;
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;  // sample (n-1); 0 with degenerate = true when n == 1
  bool degenerate = false;
};

// One entry per label with at least one row carrying the metric, sorted by
// label. Rows without a label on `axis` are skipped.
std::vector<GroupSummary> group_summary(std::span<const ScoreRow> rows, Metric metric,
                                        GroupAxis axis);

// Values of `metric` for rows labelled `label` on `axis`, in row order.
std::vector<double> group_values(std::span<const ScoreRow> rows, Metric metric, GroupAxis axis,
                                 std::string_view label);

// ---------------------------------------------------------------------------
// Bootstrap equivalence

struct EquivalenceResult {
  std::string group_a;
  std::string group_b;
  double mean_diff = 0.0;  // mean(a) - mean(b)
  double ci_low = 0.0;
  double ci_high = 0.0;
  double delta = 1.0;
  bool equivalent = false;
  std::size_t resamples = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultBootstrapResamples = 10000;
inline constexpr double kDefaultEquivalenceDelta = 1.0;

// [ci_low, ci_high] lies inside [-delta, +delta].
bool is_equivalent(double ci_low, double ci_high, double delta);

// Percentile bootstrap of mean(a*) - mean(b*). Resample i draws from its own
// generator seeded by (seed, i, group), so the result depends only on the
// arguments and never on `jobs`. CI = linear-interpolated 2.5/97.5 percentiles.
// Throws ContractError when |a| or |b| < 2, delta <= 0 or resamples < 1000.
EquivalenceResult bootstrap_equivalence(std::span<const double> a, std::span<const double> b,
                                        double delta, std::size_t resamples, std::uint64_t seed,
                                        std::size_t jobs = 1);

// Linear-interpolation percentile (q in [0, 1]) of already sorted data.
double sorted_percentile(std::span<const double> sorted, double q);

// ---------------------------------------------------------------------------
// Paired comparisons

enum class WilcoxonMethod { Normal, Exact };

struct WilcoxonResult {
  double p = 1.0;
  double w_plus = 0.0;
  std::size_t n_nonzero = 0;
  bool degenerate = false;  // every difference was zero
};

// Signed-rank test on a - b. Zero differences are dropped, tied |d| share
// average ranks. Normal: tie-corrected variance with 0.5 continuity
// correction. Exact: the full sign-flip null distribution of W+ (ties kept).
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMethod method = WilcoxonMethod::Normal);

// mean(a - b) / sd(a - b) with sample sd. Throws DegenerateError when the
// differences have zero variance, ContractError for n < 2 or unequal lengths.
double cohens_d_paired(std::span<const double> a, std::span<const double> b);

struct PairedComparisonResult {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double wilcoxon_p = 1.0;
  bool wilcoxon_degenerate = false;
  std::optional<double> cohens_d;  // absent when undefined
  std::size_t n_pairs = 0;
};

PairedComparisonResult paired_comparison(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Metric correlation matrix

struct CorrelationEntry {
  Metric a = Metric::Quality;
  Metric b = Metric::Quality;
  std::size_t n = 0;                        // pairwise-complete rows
  std::optional<Correlation> correlation;  // absent when unavailable
};

// Pairwise-complete Spearman correlation for every ordered pair (a, b) of
// kAllMetrics, row-major in kAllMetrics order.
std::vector<CorrelationEntry> metric_correlation_matrix(std::span<const ScoreRow> rows);

}  // namespace gap
