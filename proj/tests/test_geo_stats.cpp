#include <doctest.h>

#include <gsl/gsl_fit.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gap/error.hpp"
#include "gap/geo_stats.hpp"
#include "stats_oracles.hpp"

using namespace gap;
using namespace oracle;

TEST_CASE("average ranks") {
  const std::vector<double> v = {10, 20, 20, 5};
  CHECK(average_ranks(v) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("spearman examples") {
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> up = {10, 20, 30}, down = {3, 2, 1};
  CHECK(spearman(x, up).rho == 1.0);
  CHECK(spearman(x, up).p == 0.0);
  CHECK(spearman(x, down).rho == -1.0);

  const std::vector<double> tx = {1, 2, 2, 4}, ty = {1, 3, 2, 4};
  const Correlation c = spearman(tx, ty);
  CHECK(c.rho == doctest::Approx(0.9486832980505139).epsilon(1e-12));
  CHECK(c.p == doctest::Approx(0.05131670194948612).epsilon(1e-9));
  CHECK(c.n == 4);

  const std::vector<double> flat = {2, 2, 2};
  CHECK_THROWS_AS(spearman(flat, up), DegenerateError);
  const std::vector<double> two = {1, 2};
  CHECK_THROWS_AS(spearman(two, two), ContractError);
  CHECK_THROWS_AS(spearman(x, tx), ContractError);
}

TEST_CASE("spearman and ols agree with the reference library") {
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 30;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = std::round(4 * gauss(rng)) / 2;  // some ties
      y[i] = 0.5 * x[i] + gauss(rng);
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; })) x[0] += 1;

    const Correlation c = spearman(x, y);
    const double rho = gsl_spearman_rho(x, y);
    CHECK(std::fabs(c.rho - rho) < 1e-9);
    if (std::fabs(rho) < 1) {
      const double df = static_cast<double>(n) - 2;
      CHECK(std::fabs(c.p - t_two_sided(rho * std::sqrt(df / (1 - rho * rho)), df)) < 1e-6);
    }

    double c0, c1, cov00, cov01, cov11, sumsq;
    gsl_fit_linear(x.data(), 1, y.data(), 1, n, &c0, &c1, &cov00, &cov01, &cov11, &sumsq);
    const SlopeFit f = ols_trend(x, y);
    CHECK(std::fabs(f.slope - c1) < 1e-9);
    CHECK(std::fabs(f.intercept - c0) < 1e-9);
    if (sumsq > 0)
      CHECK(std::fabs(f.p - t_two_sided(c1 / std::sqrt(cov11), static_cast<double>(n) - 2)) <
            1e-6);
  }
}

TEST_CASE("ols trend examples") {
  const std::vector<double> x = {0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(2 * v + 1);
  const SlopeFit exact = ols_trend(x, y);
  CHECK(exact.slope == doctest::Approx(2.0));
  CHECK(exact.intercept == doctest::Approx(1.0));
  CHECK(exact.p == 0.0);

  const std::vector<double> flat = {3, 3, 3, 3, 3};
  const SlopeFit zero = ols_trend(x, flat);
  CHECK(zero.slope == 0.0);
  CHECK(zero.p == 1.0);
  CHECK_THROWS_AS(ols_trend(flat, x), ContractError);

  // Normal equations on ten random points.
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<double> rx(10), ry(10);
  for (std::size_t i = 0; i < 10; ++i) {
    rx[i] = u(rng);
    ry[i] = 0.7 * rx[i] + u(rng);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < 10; ++i) {
    sx += rx[i];
    sy += ry[i];
    sxx += rx[i] * rx[i];
    sxy += rx[i] * ry[i];
  }
  const double slope = (10 * sxy - sx * sy) / (10 * sxx - sx * sx);
  CHECK(std::fabs(ols_trend(rx, ry).slope - slope) < 1e-9);
}

TEST_CASE("trend combines both tests") {
  const std::vector<double> x = {1, 2, 3, 4, 5, 6};
  const std::vector<double> y = {1.1, 1.9, 3.2, 3.9, 5.1, 6.3};
  const TrendResult t = trend(x, y);
  CHECK(t.srcc == 1.0);
  CHECK(t.slope > 0.9);
  CHECK(t.slope_p < 0.001);
  CHECK(t.n == 6);
}

TEST_CASE("group summary") {
  std::vector<ScoreRow> rows;
  for (double v : {3.0, 3.0, 3.0}) {
    ScoreRow r;
    r.continent = Continent::Europe;
    r.human_avg = v;
    rows.push_back(r);
  }
  for (double v : {1.0, 5.0}) {
    ScoreRow r;
    r.continent = Continent::Asia;
    r.human_avg = v;
    rows.push_back(r);
  }
  ScoreRow lone;
  lone.continent = Continent::Africa;
  lone.human_avg = 2.0;
  rows.push_back(lone);
  ScoreRow unlabeled;
  unlabeled.human_avg = 4.0;
  rows.push_back(unlabeled);
  ScoreRow missing_metric;
  missing_metric.continent = Continent::Oceania;
  rows.push_back(missing_metric);

  const auto g = group_summary(rows, Metric::HumanAvg, GroupAxis::Continent);
  REQUIRE(g.size() == 3);
  CHECK(g[0].label == "Africa");
  CHECK(g[0].n == 1);
  CHECK(g[0].std == 0.0);
  CHECK(g[0].degenerate);
  CHECK(g[1].label == "Asia");
  CHECK(g[1].mean == 3.0);
  CHECK(g[1].std == doctest::Approx(2.828427).epsilon(1e-6));
  CHECK(g[2].label == "Europe");
  CHECK(g[2].n == 3);
  CHECK(g[2].mean == 3.0);
  CHECK(g[2].std == 0.0);
  CHECK_FALSE(g[2].degenerate);

  CHECK(group_values(rows, Metric::HumanAvg, GroupAxis::Continent, "Asia") ==
        std::vector<double>{1, 5});
  CHECK(group_summary(rows, Metric::VlmAvg, GroupAxis::Continent).empty());
}

TEST_CASE("equivalence decision rule") {
  CHECK(is_equivalent(0.38, 0.99, 1.0));
  CHECK(is_equivalent(-0.17, 0.36, 1.0));
  CHECK(is_equivalent(0.01, 0.32, 1.0));
  CHECK_FALSE(is_equivalent(0.50, 1.20, 1.0));
  CHECK_FALSE(is_equivalent(-1.01, 0.2, 1.0));
  CHECK(is_equivalent(-1.0, 1.0, 1.0));
}

TEST_CASE("bootstrap equivalence") {
  const std::vector<double> same = {3, 3, 3, 3};
  const EquivalenceResult flat = bootstrap_equivalence(same, same, 1.0, 1000, 0);
  CHECK(flat.mean_diff == 0.0);
  CHECK(flat.ci_low == 0.0);
  CHECK(flat.ci_high == 0.0);
  CHECK(flat.equivalent);

  std::mt19937 rng(17);
  std::normal_distribution<double> gauss(3.0, 0.85);
  std::vector<double> a(40), b(35);
  for (double& v : a) v = gauss(rng);
  for (double& v : b) v = gauss(rng) + 0.2;

  const auto r1 = bootstrap_equivalence(a, b, 1.0, 2000, 42, 1);
  const auto r2 = bootstrap_equivalence(a, b, 1.0, 2000, 42, 1);
  const auto r4 = bootstrap_equivalence(a, b, 1.0, 2000, 42, 4);
  CHECK(r1.ci_low == r2.ci_low);
  CHECK(r1.ci_high == r2.ci_high);
  CHECK(r1.ci_low == r4.ci_low);
  CHECK(r1.ci_high == r4.ci_high);
  CHECK(r1.mean_diff == r4.mean_diff);
  CHECK(r1.ci_low <= r1.mean_diff);
  CHECK(r1.mean_diff <= r1.ci_high);

  const auto other_seed = bootstrap_equivalence(a, b, 1.0, 2000, 43, 1);
  CHECK(other_seed.ci_low != r1.ci_low);

  // Swapping the groups mirrors the interval.
  const auto swapped = bootstrap_equivalence(b, a, 1.0, 2000, 42, 1);
  CHECK(swapped.mean_diff == doctest::Approx(-r1.mean_diff));
  CHECK(swapped.equivalent == r1.equivalent);

  const std::vector<double> one = {1};
  CHECK_THROWS_AS(bootstrap_equivalence(one, a, 1.0, 1000, 0), ContractError);
  CHECK_THROWS_AS(bootstrap_equivalence(a, b, 0.0, 1000, 0), ContractError);
  CHECK_THROWS_AS(bootstrap_equivalence(a, b, 1.0, 10, 0), ContractError);
}

TEST_CASE("sorted percentile interpolates linearly") {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  CHECK(sorted_percentile(v, 0.0) == 1.0);
  CHECK(sorted_percentile(v, 1.0) == 5.0);
  CHECK(sorted_percentile(v, 0.5) == 3.0);
  CHECK(sorted_percentile(v, 0.1) == doctest::Approx(1.4));
}

TEST_CASE("wilcoxon examples") {
  const std::vector<double> a = {1, 2, 3}, b = {1, 2, 3};
  const WilcoxonResult none = wilcoxon_signed_rank(a, b);
  CHECK(none.p == 1.0);
  CHECK(none.degenerate);

  const std::vector<double> up = {2, 3, 4, 5, 6, 7}, base = {1, 2, 3, 4, 5, 6};
  CHECK(wilcoxon_signed_rank(up, base, WilcoxonMethod::Exact).p ==
        doctest::Approx(2.0 / 64).epsilon(1e-12));
  CHECK(wilcoxon_signed_rank(up, base).p == doctest::Approx(0.01965615725016987).epsilon(1e-9));

  const std::vector<double> x = {2.99, 4.05, 3.74, 3.72, 4.62, 1.79, 2.37, 1.68, 2.89, 4.0, 2.98, 3.5};
  const std::vector<double> y = {1.39, 3.45, 2.39, 5.08, 4.19, 4.25, 3.24, 3.91, 3.96, 2.96, 2.8, 3.19};
  CHECK(std::fabs(wilcoxon_signed_rank(x, y).p - 0.7240816609153895) < 1e-6);
}

TEST_CASE("wilcoxon agrees with independent computations") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> score(0, 10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng() % 10;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = score(rng) / 2.0;  // half-point scores give ties and zeros
      b[i] = score(rng) / 2.0;
    }
    if (nonzero_diffs(a, b).empty()) continue;
    const auto normal = wilcoxon_signed_rank(a, b, WilcoxonMethod::Normal);
    const auto exact = wilcoxon_signed_rank(a, b, WilcoxonMethod::Exact);
    CHECK(std::fabs(normal.p - wilcoxon_normal_oracle(a, b)) < 1e-6);
    CHECK(std::fabs(exact.p - wilcoxon_exact_oracle(a, b)) < 1e-9);
    CHECK(wilcoxon_signed_rank(b, a).p == doctest::Approx(normal.p));
  }
}

TEST_CASE("paired cohen's d") {
  const std::vector<double> zero = {0, 0}, d02 = {0, 2};
  CHECK(cohens_d_paired(d02, zero) == doctest::Approx(0.707107).epsilon(1e-6));
  const std::vector<double> a = {1, 2, 3}, b = {0, 0, 0};
  CHECK(cohens_d_paired(a, b) == doctest::Approx(2.0));
  const std::vector<double> mean1sd1 = {0, 1, 2}, zeros3 = {0, 0, 0};
  CHECK(cohens_d_paired(mean1sd1, zeros3) == doctest::Approx(1.0));
  const std::vector<double> ones = {1, 1, 1};
  CHECK_THROWS_AS(cohens_d_paired(ones, zeros3), DegenerateError);

  std::mt19937 rng(29);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 20;
    std::vector<double> x(n), y(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = gauss(rng) + 0.3;
      y[i] = gauss(rng);
      d[i] = x[i] - y[i];
    }
    const double ref = gsl_stats_mean(d.data(), 1, n) / gsl_stats_sd(d.data(), 1, n);
    CHECK(std::fabs(cohens_d_paired(x, y) - ref) < 1e-9);
  }
}

TEST_CASE("paired comparison reports an undefined effect as absent") {
  const std::vector<double> a = {2, 3, 4}, b = {1, 2, 3};
  const PairedComparisonResult r = paired_comparison(a, b);
  CHECK(r.mean_a == 3.0);
  CHECK(r.mean_b == 2.0);
  CHECK_FALSE(r.cohens_d.has_value());
  CHECK(r.n_pairs == 3);
}

TEST_CASE("metric correlation matrix") {
  std::mt19937 rng(31);
  std::normal_distribution<double> gauss;
  std::vector<ScoreRow> rows(20);
  for (ScoreRow& r : rows) {
    r.quality = gauss(rng);
    r.patch_clip = gauss(rng);
    r.keypoint = std::exp(*r.patch_clip);  // monotone transform
    r.vlm_avg = gauss(rng);
    r.human_avg = gauss(rng);
  }
  rows[3].human_avg.reset();
  rows[7].human_avg.reset();

  const auto m = metric_correlation_matrix(rows);
  REQUIRE(m.size() == 25);
  for (const CorrelationEntry& e : m) {
    REQUIRE(e.correlation.has_value());
    std::vector<double> x, y;
    for (const ScoreRow& r : rows) {
      if (r.metric(e.a) && r.metric(e.b)) {
        x.push_back(*r.metric(e.a));
        y.push_back(*r.metric(e.b));
      }
    }
    CHECK(e.n == x.size());
    CHECK(std::fabs(e.correlation->rho - gsl_spearman_rho(x, y)) < 1e-9);
    if (e.a == e.b) CHECK(e.correlation->rho == doctest::Approx(1.0));
  }
  CHECK(m[1 * 5 + 2].correlation->rho == doctest::Approx(1.0));  // patch vs keypoint
  CHECK(m[4 * 5 + 4].n == 18);

  std::vector<ScoreRow> sparse(2);
  sparse[0].quality = 1;
  sparse[1].quality = 2;
  CHECK_FALSE(metric_correlation_matrix(sparse)[0].correlation.has_value());
}
