#pragma once

#include <span>
#include <vector>

#include "gap/interchange.hpp"

namespace gap {

struct PatchScore {
  std::vector<double> per_frame;
  double video = 0.0;
};

// Symmetric max-matching score between two unit-norm patch sets:
//   1/2 * ( mean_i max_j <g_i, f_j> + mean_j max_i <f_j, g_i> )
// Bit-symmetric in its arguments. Result lies in [-1, 1]; negative values
// are kept.
double patch_similarity(const PatchEmbeddings& gt, const PatchEmbeddings& frame);

// Video-level score is the arithmetic mean of the per-frame scores.
PatchScore video_patch_score(std::vector<double> per_frame);

}  // namespace gap
