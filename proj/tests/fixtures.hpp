#pragma once

// Random keypoint fixtures shared by the unit tests and the acceptance suite.
// Each fixture carries the engine-side inputs and a plain copy for the oracle.

#include <cmath>
#include <random>
#include <vector>

#include "gap/interchange.hpp"
#include "gap/metrics_keypoint.hpp"
#include "oracles.hpp"

namespace fixture {

struct KeypointFixture {
  gap::LuminanceRaster gray;
  std::vector<gap::RegionMask> masks;
  gap::MatchSet matches;
  gap::MatchSet self;
  gap::KeypointParams params;

  std::vector<std::vector<double>> oracle_gray;
  std::vector<oracle::Region> oracle_regions;
  std::vector<oracle::Pair> oracle_matches;
  std::vector<oracle::Pair> oracle_self;
};

inline gap::RegionMask rect_mask(gap::ImageSize size, std::size_t x0, std::size_t y0,
                                 std::size_t x1, std::size_t y1) {
  std::vector<std::uint8_t> px(size.width * size.height, 0);
  for (std::size_t y = y0; y < y1; ++y)
    for (std::size_t x = x0; x < x1; ++x) px[y * size.width + x] = 1;
  return gap::make_mask(size, std::move(px), "region");
}

// Up to 3 rectangular regions and up to 25 frame matches related by a noisy
// similarity transform.
inline KeypointFixture random_keypoint_fixture(std::mt19937& rng) {
  std::uniform_real_distribution<double> unit(0, 1);
  KeypointFixture fx;
  const std::size_t w = 12 + rng() % 20, h = 12 + rng() % 20;
  fx.gray = {{w, h}, std::vector<double>(w * h)};
  fx.oracle_gray.assign(h, std::vector<double>(w));
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x)
      fx.oracle_gray[y][x] = fx.gray.values[y * w + x] = 255 * unit(rng);

  const std::size_t k = 1 + rng() % 3;
  for (std::size_t r = 0; r < k; ++r) {
    const std::size_t x0 = rng() % (w / 2), y0 = rng() % (h / 2);
    const std::size_t x1 = x0 + 3 + rng() % (w - x0 - 2), y1 = y0 + 3 + rng() % (h - y0 - 2);
    fx.masks.push_back(rect_mask({w, h}, x0, y0, std::min(x1, w), std::min(y1, h)));
    oracle::Region o{std::vector<std::vector<int>>(h, std::vector<int>(w))};
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) o.mask[y][x] = fx.masks.back().contains(x, y);
    fx.oracle_regions.push_back(std::move(o));
  }

  const auto point = [&] {
    return gap::Point2{unit(rng) * (static_cast<double>(w) - 1),
                       unit(rng) * (static_cast<double>(h) - 1)};
  };
  const double t = 0.3 * (unit(rng) - 0.5), s = 0.8 + 0.4 * unit(rng);
  const std::size_t n = 2 + rng() % 24;
  for (std::size_t i = 0; i < n; ++i) {
    const gap::Point2 g = point();
    const gap::Point2 f{s * (std::cos(t) * g.x - std::sin(t) * g.y) + 2 + unit(rng),
                        s * (std::sin(t) * g.x + std::cos(t) * g.y) + 1 + unit(rng)};
    fx.matches.pairs.push_back({g, f, unit(rng)});
    fx.oracle_matches.push_back({{g.x, g.y}, {f.x, f.y}});
  }
  const std::size_t ns = 3 + rng() % 23;
  for (std::size_t i = 0; i < ns; ++i) {
    const gap::Point2 g = point();
    fx.self.pairs.push_back({g, g, 1.0});
    fx.oracle_self.push_back({{g.x, g.y}, {g.x, g.y}});
  }

  fx.params.tau = 100 + 5000 * unit(rng);
  fx.params.beta = 0.5 + 2 * unit(rng);
  return fx;
}

inline double engine_score(const KeypointFixture& fx) {
  const auto regions = gap::prepare_regions(fx.gray, fx.masks, fx.params);
  return gap::evaluate_frame(regions, fx.matches, fx.self, fx.params).alignment.total;
}

inline double oracle_score(const KeypointFixture& fx) {
  return oracle::frame_score(fx.oracle_gray, fx.oracle_regions, fx.oracle_matches, fx.oracle_self,
                             fx.params.tau, fx.params.beta);
}

}  // namespace fixture
