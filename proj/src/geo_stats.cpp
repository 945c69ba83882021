#include "gap/geo_stats.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "gap/error.hpp"

namespace gap {

namespace {

constexpr std::array<std::string_view, 5> kMetricNames = {"quality", "patch_clip", "keypoint",
                                                          "vlm_avg", "human_avg"};

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  const double m = mean_of(v);
  double sq = 0.0;
  for (double x : v) sq += (x - m) * (x - m);
  return std::sqrt(sq / static_cast<double>(v.size() - 1));
}

double t_two_sided(double t, double dof) {
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t_distribution<double> dist(dof);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

void require_paired(std::span<const double> x, std::span<const double> y, std::size_t min_n,
                    const char* who) {
  if (x.size() != y.size()) throw ContractError(std::string(who) + ": inputs differ in length");
  if (x.size() < min_n) {
    throw ContractError(std::string(who) + ": need at least " + std::to_string(min_n) +
                        " observations, got " + std::to_string(x.size()));
  }
}

}  // namespace

std::string_view to_string(Metric m) { return kMetricNames[static_cast<std::size_t>(m)]; }

std::optional<Metric> parse_metric(std::string_view s) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i) {
    if (kMetricNames[i] == s) return static_cast<Metric>(i);
  }
  return std::nullopt;
}

std::string_view to_string(GroupAxis a) {
  switch (a) {
    case GroupAxis::Continent:
      return "continent";
    case GroupAxis::NorthSouth:
      return "north_south";
    case GroupAxis::WestEast:
      return "west_east";
  }
  return "";
}

std::optional<double> ScoreRow::metric(Metric m) const {
  switch (m) {
    case Metric::Quality:
      return quality;
    case Metric::PatchClip:
      return patch_clip;
    case Metric::Keypoint:
      return keypoint;
    case Metric::VlmAvg:
      return vlm_avg;
    case Metric::HumanAvg:
      return human_avg;
  }
  return std::nullopt;
}

std::optional<std::string> ScoreRow::group_label(GroupAxis axis) const {
  switch (axis) {
    case GroupAxis::Continent:
      if (continent) return std::string(to_string(*continent));
      break;
    case GroupAxis::NorthSouth:
      if (north_south) return std::string(to_string(*north_south));
      break;
    case GroupAxis::WestEast:
      if (west_east) return std::string(to_string(*west_east));
      break;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 are 1-based ranks i+1..j
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
    i = j;
  }
  return ranks;
}

Correlation spearman(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 3, "spearman");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean_of(rx);
  const double my = mean_of(ry);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mx;
    const double dy = ry[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DegenerateError("spearman: correlation undefined for constant input");
  }
  Correlation c;
  c.n = x.size();
  c.rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  if (std::fabs(c.rho) == 1.0) {
    c.p = 0.0;
  } else {
    const double dof = static_cast<double>(c.n - 2);
    c.p = t_two_sided(c.rho * std::sqrt(dof / (1.0 - c.rho * c.rho)), dof);
  }
  return c;
}

SlopeFit ols_trend(std::span<const double> x, std::span<const double> y) {
  require_paired(x, y, 3, "ols_trend");
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw ContractError("ols_trend: x has zero variance");

  SlopeFit fit;
  fit.n = x.size();
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    ssr += r * r;
  }
  const double dof = static_cast<double>(fit.n - 2);
  const double se = std::sqrt(ssr / dof / sxx);
  if (se == 0.0) {
    fit.p = fit.slope == 0.0 ? 1.0 : 0.0;
  } else {
    fit.p = t_two_sided(fit.slope / se, dof);
  }
  return fit;
}

TrendResult trend(std::span<const double> x, std::span<const double> y) {
  const Correlation c = spearman(x, y);
  const SlopeFit f = ols_trend(x, y);
  return {c.rho, c.p, f.slope, f.p, c.n};
}

// ---------------------------------------------------------------------------

std::vector<GroupSummary> group_summary(std::span<const ScoreRow> rows, Metric metric,
                                        GroupAxis axis) {
  std::map<std::string, std::vector<double>> groups;
  for (const ScoreRow& r : rows) {
    auto label = r.group_label(axis);
    auto v = r.metric(metric);
    if (label && v) groups[*label].push_back(*v);
  }
  std::vector<GroupSummary> out;
  for (const auto& [label, values] : groups) {
    GroupSummary g;
    g.label = label;
    g.n = values.size();
    g.mean = mean_of(values);
    if (g.n == 1) {
      g.degenerate = true;
    } else {
      g.std = sample_sd(values);
    }
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<double> group_values(std::span<const ScoreRow> rows, Metric metric, GroupAxis axis,
                                 std::string_view label) {
  std::vector<double> out;
  for (const ScoreRow& r : rows) {
    auto l = r.group_label(axis);
    auto v = r.metric(metric);
    if (l && v && *l == label) out.push_back(*v);
  }
  return out;
}

// ---------------------------------------------------------------------------

bool is_equivalent(double ci_low, double ci_high, double delta) {
  return ci_low >= -delta && ci_high <= delta;
}

double sorted_percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ContractError("sorted_percentile: empty input");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

std::mt19937_64 substream(std::uint64_t seed, std::uint64_t index, std::uint32_t group) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    group};
  return std::mt19937_64(seq);
}

// Mean of |values| draws with replacement; index = floor(u * n) with u a
// 64-bit uniform, via a 128-bit product.
double resample_mean(std::span<const double> values, std::mt19937_64& rng) {
  const auto n = static_cast<unsigned __int128>(values.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto idx = static_cast<std::size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
    sum += values[idx];
  }
  return sum / static_cast<double>(values.size());
}

}  // namespace

EquivalenceResult bootstrap_equivalence(std::span<const double> a, std::span<const double> b,
                                        double delta, std::size_t resamples, std::uint64_t seed,
                                        std::size_t jobs) {
  if (a.size() < 2 || b.size() < 2) {
    throw ContractError("bootstrap_equivalence: each group needs at least 2 values");
  }
  if (!(delta > 0.0)) throw ContractError("bootstrap_equivalence: delta must be positive");
  if (resamples < 1000) throw ContractError("bootstrap_equivalence: need at least 1000 resamples");
  jobs = std::clamp<std::size_t>(jobs, 1, resamples);

  std::vector<double> diffs(resamples);
  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      auto ra = substream(seed, i, 0);
      auto rb = substream(seed, i, 1);
      diffs[i] = resample_mean(a, ra) - resample_mean(b, rb);
    }
  };
  if (jobs == 1) {
    work(0, resamples);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (resamples + jobs - 1) / jobs;
    for (std::size_t begin = 0; begin < resamples; begin += chunk) {
      pool.emplace_back(work, begin, std::min(begin + chunk, resamples));
    }
  }
  std::sort(diffs.begin(), diffs.end());

  EquivalenceResult r;
  r.mean_diff = mean_of(a) - mean_of(b);
  r.ci_low = sorted_percentile(diffs, 0.025);
  r.ci_high = sorted_percentile(diffs, 0.975);
  r.delta = delta;
  r.equivalent = is_equivalent(r.ci_low, r.ci_high, delta);
  r.resamples = resamples;
  r.seed = seed;
  return r;
}

// ---------------------------------------------------------------------------

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b,
                                    WilcoxonMethod method) {
  require_paired(a, b, 1, "wilcoxon_signed_rank");
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult res;
  res.n_nonzero = diffs.size();
  if (diffs.empty()) {
    res.degenerate = true;
    return res;
  }

  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(),
                 [](double d) { return std::fabs(d); });
  const auto ranks = average_ranks(magnitudes);
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    if (diffs[i] > 0) res.w_plus += ranks[i];
  }
  const auto n = static_cast<double>(diffs.size());
  const double expected = n * (n + 1.0) / 4.0;

  if (method == WilcoxonMethod::Exact) {
    // Ranks are multiples of 1/2, so 2*W+ is an integer; count sign flips by
    // dynamic programming over doubled rank sums.
    std::vector<std::size_t> doubled(ranks.size());
    std::size_t total = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
      doubled[i] = static_cast<std::size_t>(std::lround(2.0 * ranks[i]));
      total += doubled[i];
    }
    std::vector<double> ways(total + 1, 0.0);
    ways[0] = 1.0;
    std::size_t reach = 0;
    for (std::size_t r : doubled) {
      for (std::size_t s = reach + 1; s-- > 0;) {
        if (ways[s] != 0.0) ways[s + r] += ways[s];
      }
      reach += r;
    }
    const auto observed = static_cast<long long>(std::lround(2.0 * res.w_plus));
    const auto centre2 = static_cast<long long>(total);  // 4 * expected
    const long long dev = std::llabs(2 * observed - centre2);
    double extreme = 0.0;
    for (std::size_t s = 0; s <= total; ++s) {
      if (std::llabs(2 * static_cast<long long>(s) - centre2) >= dev) extreme += ways[s];
    }
    res.p = std::min(1.0, extreme / std::ldexp(1.0, static_cast<int>(diffs.size())));
    return res;
  }

  std::map<double, std::size_t> tie_counts;
  for (double m : magnitudes) ++tie_counts[m];
  double tie_term = 0.0;
  for (const auto& [value, t] : tie_counts) {
    const auto tt = static_cast<double>(t);
    tie_term += tt * tt * tt - tt;
  }
  const double variance = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
  const double se = std::sqrt(variance);
  double z = (res.w_plus - expected) / se;
  if (z > 0) {
    z -= 0.5 / se;
  } else if (z < 0) {
    z += 0.5 / se;
  }
  const boost::math::normal_distribution<double> normal;
  res.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(normal, std::fabs(z))));
  return res;
}

double cohens_d_paired(std::span<const double> a, std::span<const double> b) {
  require_paired(a, b, 2, "cohens_d_paired");
  std::vector<double> diffs(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diffs[i] = a[i] - b[i];
  const double sd = sample_sd(diffs);
  if (sd == 0.0) throw DegenerateError("cohens_d_paired: differences have zero variance");
  return mean_of(diffs) / sd;
}

PairedComparisonResult paired_comparison(std::span<const double> a, std::span<const double> b) {
  require_paired(a, b, 2, "paired_comparison");
  PairedComparisonResult r;
  r.n_pairs = a.size();
  r.mean_a = mean_of(a);
  r.mean_b = mean_of(b);
  const WilcoxonResult w = wilcoxon_signed_rank(a, b);
  r.wilcoxon_p = w.p;
  r.wilcoxon_degenerate = w.degenerate;
  try {
    r.cohens_d = cohens_d_paired(a, b);
  } catch (const DegenerateError&) {
    r.cohens_d.reset();
  }
  return r;
}

// ---------------------------------------------------------------------------

std::vector<CorrelationEntry> metric_correlation_matrix(std::span<const ScoreRow> rows) {
  std::vector<CorrelationEntry> out;
  for (Metric ma : kAllMetrics) {
    for (Metric mb : kAllMetrics) {
      CorrelationEntry e{ma, mb, 0, std::nullopt};
      std::vector<double> xs, ys;
      for (const ScoreRow& r : rows) {
        auto x = r.metric(ma);
        auto y = r.metric(mb);
        if (x && y) {
          xs.push_back(*x);
          ys.push_back(*y);
        }
      }
      e.n = xs.size();
      if (e.n >= 3) {
        try {
          e.correlation = spearman(xs, ys);
        } catch (const DegenerateError&) {
          e.correlation.reset();
        }
      }
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace gap
