#include "gap/metrics_patch.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <numeric>

#include "gap/error.hpp"

namespace gap {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMatrix> as_matrix(const PatchEmbeddings& e) {
  return {e.tokens.data(), static_cast<Eigen::Index>(e.num_patches),
          static_cast<Eigen::Index>(e.dim)};
}

// Operand order for the similarity product must not depend on argument order,
// otherwise GEMM rounding can differ between f(a,b) and f(b,a).
bool goes_first(const PatchEmbeddings& a, const PatchEmbeddings& b) {
  if (a.num_patches != b.num_patches) return a.num_patches < b.num_patches;
  return !std::lexicographical_compare(b.tokens.begin(), b.tokens.end(), a.tokens.begin(),
                                       a.tokens.end());
}

}  // namespace

double patch_similarity(const PatchEmbeddings& gt, const PatchEmbeddings& frame) {
  if (gt.num_patches == 0 || frame.num_patches == 0) {
    throw ContractError("patch_similarity: empty token set");
  }
  if (gt.dim != frame.dim) {
    throw ContractError("patch_similarity: embedding dim mismatch (" + std::to_string(gt.dim) +
                        " vs " + std::to_string(frame.dim) + ")");
  }

  const bool gt_first = goes_first(gt, frame);
  const PatchEmbeddings& lhs = gt_first ? gt : frame;
  const PatchEmbeddings& rhs = gt_first ? frame : gt;
  const RowMatrix sim = as_matrix(lhs) * as_matrix(rhs).transpose();

  const double row_term = sim.rowwise().maxCoeff().mean();
  const double col_term = sim.colwise().maxCoeff().mean();
  const double forward = gt_first ? row_term : col_term;
  const double backward = gt_first ? col_term : row_term;
  return std::clamp(0.5 * (forward + backward), -1.0, 1.0);
}

PatchScore video_patch_score(std::vector<double> per_frame) {
  if (per_frame.empty()) throw ContractError("video_patch_score: no frames");
  PatchScore s;
  s.video = std::accumulate(per_frame.begin(), per_frame.end(), 0.0) /
            static_cast<double>(per_frame.size());
  s.per_frame = std::move(per_frame);
  return s;
}

}  // namespace gap
