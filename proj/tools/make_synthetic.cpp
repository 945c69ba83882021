// Writes the small synthetic benchmark used by the test suites:
//   gap_make_synthetic <out_dir>
// Everything is derived from closed-form patterns, so re-running produces
// identical files.

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "gap/interchange.hpp"
#include "gap/raster.hpp"

namespace {

namespace fs = std::filesystem;

constexpr std::size_t kWidth = 64;
constexpr std::size_t kHeight = 48;
constexpr std::size_t kFrames = 5;

struct Attraction {
  std::string id, name, city, country, continent, ns, we, category;
  std::uint64_t pageviews;
  double phase;
  std::vector<std::array<std::size_t, 4>> rects;  // x0, y0, x1, y1
};

gap::Raster8 textured(double phase, double shift) {
  gap::Raster8 img;
  img.size = {kWidth, kHeight};
  img.channels = 3;
  img.data.resize(kWidth * kHeight * 3);
  for (std::size_t y = 0; y < kHeight; ++y) {
    for (std::size_t x = 0; x < kWidth; ++x) {
      const double xs = static_cast<double>(x) + shift;
      const double ys = static_cast<double>(y);
      const double base[3] = {128 + 100 * std::sin(0.7 * xs + phase) * std::cos(0.5 * ys),
                              128 + 90 * std::cos(0.3 * xs - phase) * std::sin(0.9 * ys),
                              128 + 60 * std::sin(0.2 * (xs + ys) + phase)};
      for (int c = 0; c < 3; ++c) {
        img.data[(y * kWidth + x) * 3 + static_cast<std::size_t>(c)] =
            static_cast<std::uint8_t>(std::clamp(std::lround(base[c]), 0L, 255L));
      }
    }
  }
  return img;
}

gap::PatchEmbeddings embeddings(double phase, double noise) {
  constexpr std::size_t rows = 3, cols = 4, dim = 8;
  std::vector<double> v(rows * cols * dim);
  for (std::size_t i = 0; i < rows * cols; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      const double di = static_cast<double>(i), dk = static_cast<double>(k);
      v[i * dim + k] = std::sin(1.3 * di + 0.7 * dk + phase) + 0.1 * dk +
                       noise * std::cos(2.1 * di * dk + 3.0 * phase);
    }
  }
  return gap::make_embeddings(rows * cols, dim, rows, cols, std::move(v));
}

std::vector<gap::Point2> grid_points() {
  std::vector<gap::Point2> pts;
  for (std::size_t j = 0; j < 11; ++j) {
    for (std::size_t i = 0; i < 15; ++i) {
      pts.push_back({2.0 + 4.0 * static_cast<double>(i), 2.0 + 4.0 * static_cast<double>(j)});
    }
  }
  return pts;
}

gap::MatchSet frame_matches(std::size_t frame, double phase) {
  const auto pts = grid_points();
  gap::MatchSet set;
  const double angle = 0.05 * static_cast<double>(frame);
  const double scale = 1.0 - 0.04 * static_cast<double>(frame);
  const double cx = kWidth / 2.0, cy = kHeight / 2.0;
  const std::size_t keep_every = frame % 3 + 1;
  for (std::size_t n = 0; n < pts.size(); ++n) {
    if ((n + frame) % keep_every != 0) continue;
    const gap::Point2 p = pts[n];
    const double jitter = frame == 0 ? 0.0 : 0.4 * std::sin(static_cast<double>(n) * 1.7 + phase);
    const double dx = p.x - cx, dy = p.y - cy;
    double fx = cx + scale * (std::cos(angle) * dx - std::sin(angle) * dy) + jitter;
    double fy = cy + scale * (std::sin(angle) * dx + std::cos(angle) * dy) - jitter;
    fx = std::clamp(fx, 0.0, kWidth - 0.5);
    fy = std::clamp(fy, 0.0, kHeight - 0.5);
    set.pairs.push_back({p, {fx, fy}, 0.9});
  }
  return set;
}

gap::MatchSet self_matches() {
  gap::MatchSet set;
  for (const auto& p : grid_points()) set.pairs.push_back({p, p, 1.0});
  return set;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: gap_make_synthetic <out_dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  fs::create_directories(root / "images");
  fs::create_directories(root / "features");

  const std::vector<Attraction> specs = {
      {"alpha_tower", "Alpha Tower", "Lyon", "France", "Europe", "GlobalNorth", "GlobalWest",
       "tower", 120000, 0.3, {{8, 6, 40, 30}, {30, 20, 60, 44}}},
      {"beta_bridge", "Beta Bridge", "Hanoi", "Vietnam", "Asia", "GlobalSouth", "GlobalEast",
       "bridge", 45000, 1.1, {{4, 4, 56, 40}}},
      {"gamma_gate", "Gamma Gate", "Lima, Old Town", "Peru", "Americas", "GlobalSouth",
       "GlobalWest", "monument", 980000, 2.0, {}},
  };

  nlohmann::json attractions = nlohmann::json::array();
  for (const Attraction& s : specs) {
    const fs::path gt_rel = fs::path("images") / (s.id + ".gt.png");
    gap::write_png(root / gt_rel, textured(s.phase, 0.0));
    gap::write_embeddings(root / "features" / (s.id + ".gt.emb"), embeddings(s.phase, 0.0));
    gap::write_matches(root / "features" / (s.id + ".self.matches"), self_matches());

    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t f = 0; f < kFrames; ++f) {
      const std::string stem = s.id + ".f" + std::to_string(f);
      const fs::path rel = fs::path("images") / (stem + ".png");
      gap::write_png(root / rel, textured(s.phase, 1.5 * static_cast<double>(f)));
      frames.push_back(rel.generic_string());
      gap::write_embeddings(root / "features" / (stem + ".emb"),
                            embeddings(s.phase, 0.15 * static_cast<double>(f + 1)));
      gap::write_matches(root / "features" / (stem + ".matches"), frame_matches(f, s.phase));
    }

    for (std::size_t r = 0; r < s.rects.size(); ++r) {
      const auto [x0, y0, x1, y1] = s.rects[r];
      std::vector<std::uint8_t> px(kWidth * kHeight, 0);
      for (std::size_t y = y0; y < y1; ++y) {
        for (std::size_t x = x0; x < x1; ++x) px[y * kWidth + x] = 1;
      }
      gap::write_mask(root / "features" / (s.id + ".r" + std::to_string(r) + ".mask.png"),
                      gap::make_mask({kWidth, kHeight}, std::move(px), s.category));
    }

    attractions.push_back({{"id", s.id},
                           {"name", s.name},
                           {"city", s.city},
                           {"country", s.country},
                           {"continent", s.continent},
                           {"north_south", s.ns},
                           {"west_east", s.we},
                           {"pageviews", s.pageviews},
                           {"category", s.category},
                           {"gt_image", gt_rel.generic_string()},
                           {"short_caption", "A view of " + s.name + "."},
                           {"detailed_caption", "A slow aerial shot of " + s.name + " in " +
                                                    s.city + ". Late afternoon light."},
                           {"frame_refs", frames}});
  }

  const std::vector<gap::JudgeScores> judge = {
      {"alpha_tower", 4, 3, gap::JudgeSource::VLM, std::nullopt},
      {"beta_bridge", 2, 3, gap::JudgeSource::VLM, std::nullopt},
      {"gamma_gate", 5, 4, gap::JudgeSource::VLM, std::nullopt},
      {"alpha_tower", 4, 4, gap::JudgeSource::Human, "ann1"},
      {"alpha_tower", 3, 4, gap::JudgeSource::Human, "ann2"},
      {"beta_bridge", 2, 2, gap::JudgeSource::Human, "ann1"},
  };
  const std::vector<gap::QualityScore> quality = {
      {"alpha_tower", 3.2}, {"beta_bridge", 2.8}, {"gamma_gate", 4.1}};
  gap::write_judge_scores(root / "judge.json", judge);
  gap::write_quality_scores(root / "quality.json", quality);

  const nlohmann::json manifest = {
      {"config",
       {{"n_frames", kFrames},
        {"tau", 3000.0},
        {"beta", 1.5},
        {"features_dir", "features"},
        {"judge_files", {"judge.json"}},
        {"quality_files", {"quality.json"}}}},
      {"attractions", attractions}};
  std::ofstream(root / "manifest.json") << manifest.dump(2) << "\n";
  std::cout << "wrote " << specs.size() << " attractions to " << root << "\n";
  return 0;
}
