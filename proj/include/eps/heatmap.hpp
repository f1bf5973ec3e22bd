#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <vector>

#include "eps/features.hpp"
#include "eps/pgm.hpp"
#include "eps/sampler.hpp"

namespace eps {

/// One pixel per patch (cols wide, rows tall), min-max normalized per frame:
/// round(255 * (score - min) / (max - min)); all zero when the range is
/// degenerate. `upscale` repeats each pixel n x n for visibility.
inline PgmImage render_heatmap(const ScoreField& field, Metric metric, int upscale = 1) {
  if (upscale < 1) throw std::invalid_argument("render_heatmap: upscale must be >= 1");
  if (field.scores.empty()) throw std::invalid_argument("render_heatmap: empty score field");
  if (metric == Metric::TF) {
    if (field.frame <= 1)
      throw std::invalid_argument("render_heatmap: TF is undefined on frame 1");
    for (const PatchScore& score : field.scores)
      if (!score.tf)
        throw std::invalid_argument("render_heatmap: score field has no TF values");
  }

  const int cols = field.grid.cols;
  const int rows = field.grid.rows;
  std::vector<double> values(static_cast<std::size_t>(cols) * rows, 0.0);
  for (const PatchScore& score : field.scores)
    values[static_cast<std::size_t>(score.row) * cols + score.col] =
        metric == Metric::SF ? score.sf : *score.tf;

  double lo = values[0], hi = values[0];
  for (double v : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }

  PgmImage image;
  image.width = cols * upscale;
  image.height = rows * upscale;
  image.pixels.assign(static_cast<std::size_t>(image.width) * image.height, 0);
  if (hi > lo) {
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double v = values[static_cast<std::size_t>(r) * cols + c];
        const auto level = static_cast<std::uint8_t>(
            std::llround(255.0 * (v - lo) / (hi - lo)));
        for (int dy = 0; dy < upscale; ++dy) {
          std::uint8_t* dst =
              &image.pixels[(static_cast<std::size_t>(r) * upscale + dy) * image.width +
                            static_cast<std::size_t>(c) * upscale];
          std::fill(dst, dst + upscale, level);
        }
      }
    }
  }
  return image;
}

inline void write_heatmap(const ScoreField& field, Metric metric,
                          const std::filesystem::path& path, int upscale = 1) {
  write_pgm(path, render_heatmap(field, metric, upscale));
}

}  // namespace eps
