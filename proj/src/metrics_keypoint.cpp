#include "gap/metrics_keypoint.hpp"

#include <Eigen/Core>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gap/error.hpp"

namespace gap {

// ---------------------------------------------------------------------------
// Detailness

LuminanceRaster laplacian(const LuminanceRaster& gray) {
  const std::size_t w = gray.size.width;
  const std::size_t h = gray.size.height;
  LuminanceRaster out;
  out.size = gray.size;
  out.values.resize(w * h);
  for (std::size_t y = 0; y < h; ++y) {
    const std::size_t up = y == 0 ? 0 : y - 1;
    const std::size_t down = y + 1 == h ? y : y + 1;
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t left = x == 0 ? 0 : x - 1;
      const std::size_t right = x + 1 == w ? x : x + 1;
      out.values[y * w + x] = gray.at(x, up) + gray.at(x, down) + gray.at(left, y) +
                              gray.at(right, y) - 4.0 * gray.at(x, y);
    }
  }
  return out;
}

double masked_variance(const LuminanceRaster& values, const RegionMask& mask) {
  if (values.size != mask.size) throw ContractError("masked_variance: raster/mask size mismatch");
  if (mask.area == 0) throw ContractError("masked_variance: empty mask");
  const std::size_t n = values.values.size();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.pixels[i]) sum += values.values[i];
  }
  const double mean = sum / static_cast<double>(mask.area);
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (mask.pixels[i]) {
      const double d = values.values[i] - mean;
      sq += d * d;
    }
  }
  return sq / static_cast<double>(mask.area);
}

double laplacian_variance(const LuminanceRaster& gray, const RegionMask& mask) {
  if (gray.size != mask.size) throw ContractError("laplacian_variance: raster/mask size mismatch");
  return masked_variance(laplacian(gray), mask);
}

double detailness(double variance, double tau) {
  if (!(tau > 0.0)) throw ContractError("detailness: tau must be positive");
  if (!(variance >= 0.0)) throw ContractError("detailness: variance must be non-negative");
  return 1.0 - std::exp(-variance / tau);
}

// ---------------------------------------------------------------------------
// Match density

namespace {

double distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

struct TwoNearest {
  double first = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();

  void offer(double d) {
    if (d < first) {
      second = first;
      first = d;
    } else if (d < second) {
      second = d;
    }
  }
};

std::vector<double> exhaustive_second_neighbors(std::span<const Point2> pts) {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    TwoNearest best;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != i) best.offer(distance(pts[i], pts[j]));
    }
    out[i] = best.second;
  }
  return out;
}

std::vector<double> grid_second_neighbors(std::span<const Point2> pts) {
  double min_x = pts[0].x, max_x = pts[0].x, min_y = pts[0].y, max_y = pts[0].y;
  for (const Point2& p : pts) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  const double extent = std::max(max_x - min_x, max_y - min_y);
  if (extent == 0.0) return std::vector<double>(pts.size(), 0.0);

  // About one point per cell for a uniform spread.
  const double cell = extent / std::sqrt(static_cast<double>(pts.size()));
  const auto cols = static_cast<std::ptrdiff_t>((max_x - min_x) / cell) + 1;
  const auto rows = static_cast<std::ptrdiff_t>((max_y - min_y) / cell) + 1;
  const auto cell_of = [&](const Point2& p) {
    auto cx = std::min(static_cast<std::ptrdiff_t>((p.x - min_x) / cell), cols - 1);
    auto cy = std::min(static_cast<std::ptrdiff_t>((p.y - min_y) / cell), rows - 1);
    return std::pair{cx, cy};
  };

  // Counting sort of point indices into cells.
  std::vector<std::size_t> start(static_cast<std::size_t>(rows * cols) + 1, 0);
  for (const Point2& p : pts) {
    auto [cx, cy] = cell_of(p);
    ++start[static_cast<std::size_t>(cy * cols + cx) + 1];
  }
  std::partial_sum(start.begin(), start.end(), start.begin());
  std::vector<std::size_t> order(pts.size());
  std::vector<std::size_t> fill(start.begin(), start.end() - 1);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto [cx, cy] = cell_of(pts[i]);
    order[fill[static_cast<std::size_t>(cy * cols + cx)]++] = i;
  }

  const std::ptrdiff_t max_ring = std::max(rows, cols);
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [qx, qy] = cell_of(pts[i]);
    TwoNearest best;
    const auto visit = [&](std::ptrdiff_t cx, std::ptrdiff_t cy) {
      if (cx < 0 || cy < 0 || cx >= cols || cy >= rows) return;
      const auto c = static_cast<std::size_t>(cy * cols + cx);
      for (std::size_t k = start[c]; k < start[c + 1]; ++k) {
        if (order[k] != i) best.offer(distance(pts[i], pts[order[k]]));
      }
    };
    for (std::ptrdiff_t r = 0; r <= max_ring; ++r) {
      if (r == 0) {
        visit(qx, qy);
      } else {
        for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
          visit(qx + dx, qy - r);
          visit(qx + dx, qy + r);
        }
        for (std::ptrdiff_t dy = -r + 1; dy <= r - 1; ++dy) {
          visit(qx - r, qy + dy);
          visit(qx + r, qy + dy);
        }
      }
      // Unvisited points sit at least r whole cells away.
      if (best.second <= static_cast<double>(r) * cell) break;
    }
    out[i] = best.second;
  }
  return out;
}

}  // namespace

std::vector<double> second_neighbor_distances(std::span<const Point2> points,
                                              NeighborSearch method) {
  if (points.size() < 3) {
    throw ContractError("second_neighbor_distances: need at least 3 points, got " +
                        std::to_string(points.size()));
  }
  if (method == NeighborSearch::Auto) {
    method = points.size() < kGridSearchThreshold ? NeighborSearch::Exhaustive
                                                  : NeighborSearch::Grid;
  }
  return method == NeighborSearch::Exhaustive ? exhaustive_second_neighbors(points)
                                              : grid_second_neighbors(points);
}

std::optional<double> match_density(std::span<const Point2> points, NeighborSearch method) {
  const auto nn2 = second_neighbor_distances(points, method);
  const double mean =
      std::accumulate(nn2.begin(), nn2.end(), 0.0) / static_cast<double>(nn2.size());
  if (mean == 0.0) return std::nullopt;
  return 1.0 / mean;
}

double normalized_density(double rho_frame, double rho_ref, double detailness_value,
                          double floor) {
  if (!(rho_ref > 0.0)) throw ContractError("normalized_density: reference density must be > 0");
  return rho_frame / (std::max(detailness_value, floor) * rho_ref);
}

double density_score(double r, double beta) {
  if (!(beta > 0.0)) throw ContractError("density_score: beta must be positive");
  if (!(r >= 0.0)) throw ContractError("density_score: r must be non-negative");
  return 1.0 - std::exp(-r / beta);
}

// ---------------------------------------------------------------------------
// Geometry

namespace {

// Centered, unit-Frobenius copy as an n x 2 matrix; nullopt if it collapses.
std::optional<Eigen::MatrixX2d> standardize(std::span<const Point2> pts) {
  Eigen::MatrixX2d m(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = pts[i].x;
    m(static_cast<Eigen::Index>(i), 1) = pts[i].y;
  }
  m.rowwise() -= m.colwise().mean();
  const double norm = m.norm();
  if (norm == 0.0) return std::nullopt;
  m /= norm;
  return m;
}

}  // namespace

std::optional<ProcrustesResult> procrustes_disparity(std::span<const Point2> a,
                                                     std::span<const Point2> b) {
  if (a.size() != b.size()) throw ContractError("procrustes_disparity: point sets differ in size");
  if (a.size() < 3) throw ContractError("procrustes_disparity: need at least 3 pairs");
  const auto sa = standardize(a);
  const auto sb = standardize(b);
  if (!sa || !sb) return std::nullopt;

  const Eigen::Matrix2d cross = sa->transpose() * *sb;
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(cross);
  const double trace = svd.singularValues().sum();
  ProcrustesResult r;
  r.disparity = std::clamp(1.0 - trace * trace, 0.0, 1.0);
  r.geometry = 1.0 - r.disparity;
  return r;
}

// ---------------------------------------------------------------------------
// Regions

bool in_region(const RegionMask& mask, const Point2& p) {
  const auto clamp_index = [](double v, std::size_t size) {
    const double r = std::round(v);
    if (r <= 0.0) return std::size_t{0};
    return std::min(static_cast<std::size_t>(r), size - 1);
  };
  return mask.contains(clamp_index(p.x, mask.size.width), clamp_index(p.y, mask.size.height));
}

std::vector<Match> region_matches(const RegionMask& mask, std::span<const Match> matches) {
  std::vector<Match> out;
  for (const Match& m : matches) {
    if (in_region(mask, m.gt)) out.push_back(m);
  }
  return out;
}

RegionEvaluation evaluate_region(double detailness_value, const RegionMask& mask,
                                 const MatchSet& matches, const MatchSet& self_matches,
                                 const KeypointParams& params) {
  RegionEvaluation ev;
  ev.detailness = detailness_value;

  const auto frame_in = region_matches(mask, matches.pairs);
  const auto self_in = region_matches(mask, self_matches.pairs);
  ev.frame_matches = frame_in.size();
  ev.self_matches = self_in.size();
  const std::size_t min_matches = std::max<std::size_t>(params.min_matches, 3);
  if (frame_in.size() < min_matches) {
    ev.status = RegionStatus::TooFewFrameMatches;
    return ev;
  }
  if (self_in.size() < min_matches) {
    ev.status = RegionStatus::TooFewSelfMatches;
    return ev;
  }

  std::vector<Point2> gt_pts, frame_pts, self_pts;
  for (const Match& m : frame_in) {
    gt_pts.push_back(m.gt);
    frame_pts.push_back(m.frame);
  }
  for (const Match& m : self_in) self_pts.push_back(m.gt);

  const auto rho_frame = match_density(gt_pts);
  if (!rho_frame) {
    ev.status = RegionStatus::DegenerateFrameDensity;
    return ev;
  }
  const auto rho_ref = match_density(self_pts);
  if (!rho_ref) {
    ev.status = RegionStatus::DegenerateBaseline;
    return ev;
  }
  const auto geometry = procrustes_disparity(gt_pts, frame_pts);
  if (!geometry) {
    ev.status = RegionStatus::DegenerateGeometry;
    return ev;
  }

  ev.raw_density = *rho_frame;
  ev.ref_density = *rho_ref;
  ev.normalized = normalized_density(*rho_frame, *rho_ref, detailness_value,
                                     params.detailness_floor);
  ev.density_score = density_score(ev.normalized, params.beta);
  ev.disparity = geometry->disparity;
  ev.geometry_score = geometry->geometry;
  ev.status = RegionStatus::Usable;
  return ev;
}

RegionEvaluation evaluate_region(const LuminanceRaster& gt_gray, const RegionMask& mask,
                                 const MatchSet& matches, const MatchSet& self_matches,
                                 const KeypointParams& params) {
  const double d = detailness(laplacian_variance(gt_gray, mask), params.tau);
  return evaluate_region(d, mask, matches, self_matches, params);
}

FrameAlignment frame_alignment(std::span<const RegionEvaluation> regions,
                               std::span<const std::size_t> areas) {
  if (regions.empty()) throw ContractError("frame_alignment: no regions");
  if (regions.size() != areas.size()) {
    throw ContractError("frame_alignment: regions and areas differ in length");
  }
  double total_area = 0.0;
  for (std::size_t a : areas) {
    if (a == 0) throw ContractError("frame_alignment: zero region area");
    total_area += static_cast<double>(a);
  }
  FrameAlignment fa;
  fa.weights.reserve(areas.size());
  for (std::size_t k = 0; k < regions.size(); ++k) {
    const double w = static_cast<double>(areas[k]) / total_area;
    fa.weights.push_back(w);
    if (regions[k].usable()) {
      fa.density += w * regions[k].density_score;
      fa.geometry += w * regions[k].geometry_score;
    }
  }
  fa.total = fa.density + fa.geometry;
  return fa;
}

KeypointVideoScore video_alignment(std::vector<FrameAlignment> frames) {
  if (frames.empty()) throw ContractError("video_alignment: no frames");
  KeypointVideoScore s;
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].total > frames[s.best_frame].total) s.best_frame = i;
  }
  s.video = frames[s.best_frame].total;
  s.per_frame = std::move(frames);
  return s;
}

std::vector<PreparedRegion> prepare_regions(const LuminanceRaster& gt_gray,
                                            std::vector<RegionMask> masks,
                                            const KeypointParams& params) {
  if (masks.empty()) masks.push_back(full_image_mask(gt_gray.size));
  const LuminanceRaster lap = laplacian(gt_gray);
  std::vector<PreparedRegion> out;
  out.reserve(masks.size());
  for (RegionMask& m : masks) {
    const double d = detailness(masked_variance(lap, m), params.tau);
    out.push_back({std::move(m), d});
  }
  return out;
}

FrameEvaluation evaluate_frame(std::span<const PreparedRegion> regions, const MatchSet& matches,
                               const MatchSet& self_matches, const KeypointParams& params) {
  FrameEvaluation fe;
  std::vector<std::size_t> areas;
  for (const PreparedRegion& r : regions) {
    fe.regions.push_back(evaluate_region(r.detailness, r.mask, matches, self_matches, params));
    areas.push_back(r.mask.area);
  }
  fe.alignment = frame_alignment(fe.regions, areas);
  return fe;
}

}  // namespace gap
