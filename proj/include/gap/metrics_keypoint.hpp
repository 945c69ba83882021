#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gap/interchange.hpp"
#include "gap/raster.hpp"

namespace gap {

struct KeypointParams {
  double tau = BenchmarkConfig::kDefaultTau;    // detailness scale
  double beta = BenchmarkConfig::kDefaultBeta;  // density saturation
  double detailness_floor = 1e-3;
  std::size_t min_matches = 3;
};

// ---------------------------------------------------------------------------
// Detailness

// 3x3 Laplacian [[0,1,0],[1,-4,1],[0,1,0]] with replicate padding.
LuminanceRaster laplacian(const LuminanceRaster& gray);

// Population variance of `values` over the pixels set in `mask`.
double masked_variance(const LuminanceRaster& values, const RegionMask& mask);

// Population variance of the Laplacian response of `gray` inside `mask`.
double laplacian_variance(const LuminanceRaster& gray, const RegionMask& mask);

// 1 - exp(-var / tau), in [0, 1).
double detailness(double variance, double tau);

// ---------------------------------------------------------------------------
// Match density

enum class NeighborSearch { Auto, Exhaustive, Grid };

inline constexpr std::size_t kGridSearchThreshold = 512;

// Distance from each point to its second-closest other point. Auto uses the
// exhaustive scan below kGridSearchThreshold points and a uniform grid above;
// both paths return bit-identical values. Requires >= 3 points.
std::vector<double> second_neighbor_distances(std::span<const Point2> points,
                                              NeighborSearch method = NeighborSearch::Auto);

// Inverse mean second-neighbor distance. nullopt when the mean is zero
// (all points coincide with at least two others).
std::optional<double> match_density(std::span<const Point2> points,
                                    NeighborSearch method = NeighborSearch::Auto);

// rho_f / (max(d, floor) * rho_ref).
double normalized_density(double rho_frame, double rho_ref, double detailness_value,
                          double floor = 1e-3);

// 1 - exp(-r / beta), in [0, 1).
double density_score(double r, double beta);

// ---------------------------------------------------------------------------
// Geometry

struct ProcrustesResult {
  double disparity = 0.0;  // in [0, 1]
  double geometry = 1.0;   // 1 - disparity
};

// Both sets are centered and scaled to unit Frobenius norm, then optimally
// rotated (reflections allowed). disparity = 1 - (sum of singular values of
// A^T B)^2, clipped to [0, 1]. nullopt when either set collapses to a point.
std::optional<ProcrustesResult> procrustes_disparity(std::span<const Point2> a,
                                                     std::span<const Point2> b);

// ---------------------------------------------------------------------------
// Region, frame, and video aggregation

enum class RegionStatus {
  Usable,
  TooFewFrameMatches,
  TooFewSelfMatches,
  DegenerateFrameDensity,
  DegenerateBaseline,
  DegenerateGeometry,
};

struct RegionEvaluation {
  double detailness = 0.0;
  std::size_t frame_matches = 0;  // in-region
  std::size_t self_matches = 0;   // in-region
  double raw_density = 0.0;
  double ref_density = 0.0;
  double normalized = 0.0;
  double density_score = 0.0;
  double disparity = 1.0;
  double geometry_score = 0.0;
  RegionStatus status = RegionStatus::TooFewFrameMatches;

  bool usable() const { return status == RegionStatus::Usable; }
};

// True when the mask is set at the nearest pixel to `p`, clamped to the raster.
bool in_region(const RegionMask& mask, const Point2& p);

// Matches whose ground-truth keypoint lies in the region.
std::vector<Match> region_matches(const RegionMask& mask, std::span<const Match> matches);

RegionEvaluation evaluate_region(double detailness_value, const RegionMask& mask,
                                 const MatchSet& matches, const MatchSet& self_matches,
                                 const KeypointParams& params);

RegionEvaluation evaluate_region(const LuminanceRaster& gt_gray, const RegionMask& mask,
                                 const MatchSet& matches, const MatchSet& self_matches,
                                 const KeypointParams& params);

struct FrameAlignment {
  double density = 0.0;
  double geometry = 0.0;
  double total = 0.0;
  std::vector<double> weights;
};

// Area-weighted D and G over all regions; unusable regions contribute zero
// but keep their weight.
FrameAlignment frame_alignment(std::span<const RegionEvaluation> regions,
                               std::span<const std::size_t> areas);

struct KeypointVideoScore {
  std::vector<FrameAlignment> per_frame;
  double video = 0.0;
  std::size_t best_frame = 0;  // earliest frame reaching the maximum
};

KeypointVideoScore video_alignment(std::vector<FrameAlignment> frames);

// Region data that depends only on the ground-truth image.
struct PreparedRegion {
  RegionMask mask;
  double detailness = 0.0;
};

// An empty mask list falls back to one full-image region.
std::vector<PreparedRegion> prepare_regions(const LuminanceRaster& gt_gray,
                                            std::vector<RegionMask> masks,
                                            const KeypointParams& params);

struct FrameEvaluation {
  std::vector<RegionEvaluation> regions;
  FrameAlignment alignment;
};

FrameEvaluation evaluate_frame(std::span<const PreparedRegion> regions, const MatchSet& matches,
                               const MatchSet& self_matches, const KeypointParams& params);

}  // namespace gap
