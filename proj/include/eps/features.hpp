#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "eps/dct.hpp"
#include "eps/frame.hpp"
#include "eps/parallel.hpp"

// Complexity scores of a patch from its DC-masked DCT coefficients:
//
//   SF       = sum_i sum_j exp(((i*j)/(w*h))^2 - 1) * |coeffs(i,j)|
//   TF(t)    = sum_i sum_j exp(((i*j)/(w*h))^2 - 1) * |coeffs_t(i,j) - coeffs_{t-1}(i,j)|
//
// The weight grows with frequency along both axes; with the DC term masked,
// SF is zero exactly for constant patches, and TF is zero for co-located
// patches that are pixel-identical.

namespace eps {

inline double weight(int i, int j, int w, int h) {
  const double ratio = (static_cast<double>(i) * j) / (static_cast<double>(w) * h);
  return std::exp(ratio * ratio - 1.0);
}

namespace detail {

inline const std::vector<double>& weight_table(int w, int h) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::vector<double>> cache;
  std::scoped_lock lock(mutex);
  auto it = cache.find({w, h});
  if (it == cache.end()) {
    std::vector<double> table(static_cast<std::size_t>(w) * h);
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < w; ++i)
        table[static_cast<std::size_t>(j) * w + i] = weight(i, j, w, h);
    it = cache.emplace(std::make_pair(w, h), std::move(table)).first;
  }
  return it->second;
}

inline void check_masked(const CoefficientBlock& block, const char* op) {
  if (block.coeffs.empty())
    throw std::invalid_argument(std::string(op) + ": empty coefficient block");
  if (block.coeffs[0] != 0.0)
    throw std::invalid_argument(std::string(op) +
                                ": block is not DC-masked (pipeline ordering bug)");
}

}  // namespace detail

/// Weighted L1 norm of a DC-masked coefficient block. Summation order is
/// fixed (i outer, j inner) so the result is bit-deterministic.
inline double spatial_feature(const CoefficientBlock& block) {
  detail::check_masked(block, "spatial_feature");
  const int w = block.width;
  const int h = block.height;
  const std::vector<double>& wt = detail::weight_table(w, h);
  double acc = 0.0;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < h; ++j) {
      const std::size_t idx = static_cast<std::size_t>(j) * w + i;
      acc += wt[idx] * std::abs(block.coeffs[idx]);
    }
  return acc;
}

/// Same weighted L1 norm over the coefficient difference of two co-located
/// masked blocks. Symmetric in its arguments.
inline double temporal_feature(const CoefficientBlock& current,
                               const CoefficientBlock& previous) {
  detail::check_masked(current, "temporal_feature");
  detail::check_masked(previous, "temporal_feature");
  if (current.width != previous.width || current.height != previous.height)
    throw std::invalid_argument("temporal_feature: coefficient block dimension mismatch");
  const int w = current.width;
  const int h = current.height;
  const std::vector<double>& wt = detail::weight_table(w, h);
  double acc = 0.0;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < h; ++j) {
      const std::size_t idx = static_cast<std::size_t>(j) * w + i;
      acc += wt[idx] * std::abs(current.coeffs[idx] - previous.coeffs[idx]);
    }
  return acc;
}

/// Scores of one patch. tf is absent exactly on the first frame of the
/// scored range (there is no previous frame to compare against).
struct PatchScore {
  int frame = 1;  // 1-based
  int row = 0;
  int col = 0;
  double sf = 0.0;
  std::optional<double> tf;
};

/// Per-patch scores of one frame, row-major over the grid cells.
struct ScoreField {
  int frame = 1;
  PatchGrid grid;
  std::vector<PatchScore> scores;
};

namespace detail {

inline void check_plane_grid(const LumaPlane& plane, const PatchGrid& grid) {
  validate_plane(plane);
  if (plane.width / grid.patch_w != grid.cols ||
      plane.height / grid.patch_h != grid.rows)
    throw std::invalid_argument("score_frame: plane dimensions do not match grid");
}

}  // namespace detail

/// Scores every grid cell of `plane`: SF always, TF when `previous` is given
/// (the co-located patch of the previous frame). Cells are independent; the
/// fan-out across `threads` does not change any result bit.
inline ScoreField score_frame(const LumaPlane& plane, const LumaPlane* previous,
                              const PatchGrid& grid, int frame_index,
                              unsigned threads = 1) {
  detail::check_plane_grid(plane, grid);
  if (previous) {
    if (previous->width != plane.width || previous->height != plane.height)
      throw std::invalid_argument("score_frame: plane dimension mismatch with previous frame");
    validate_plane(*previous);
  }

  ScoreField field;
  field.frame = frame_index;
  field.grid = grid;
  field.scores.resize(static_cast<std::size_t>(grid.patch_count()));
  // Warm the shared tables before the fan-out.
  detail::cosine_basis(grid.patch_w);
  detail::cosine_basis(grid.patch_h);
  detail::weight_table(grid.patch_w, grid.patch_h);

  parallel_for(field.scores.size(), threads, [&](std::size_t cell) {
    const int row = static_cast<int>(cell) / grid.cols;
    const int col = static_cast<int>(cell) % grid.cols;
    const CoefficientBlock cur = masked(dct2d(extract_patch(plane, grid, row, col)));
    PatchScore& score = field.scores[cell];
    score.frame = frame_index;
    score.row = row;
    score.col = col;
    score.sf = spatial_feature(cur);
    if (previous) {
      const CoefficientBlock prev =
          masked(dct2d(extract_patch(*previous, grid, row, col)));
      score.tf = temporal_feature(cur, prev);
    }
  });
  return field;
}

}  // namespace eps
