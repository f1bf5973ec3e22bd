#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace eps {

/// One frame's luminance samples, row-major, 8-bit.
struct LumaPlane {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  std::uint8_t at(int x, int y) const {
    return samples[static_cast<std::size_t>(y) * width + x];
  }
  std::uint8_t& at(int x, int y) {
    return samples[static_cast<std::size_t>(y) * width + x];
  }
};

inline void validate_plane(const LumaPlane& plane) {
  if (plane.width < 1 || plane.height < 1)
    throw std::invalid_argument("luma plane dimensions must be positive");
  if (plane.samples.size() !=
      static_cast<std::size_t>(plane.width) * plane.height)
    throw std::invalid_argument("luma plane sample count does not match dimensions");
}

/// Ordered frames of one video, all sharing the same dimensions.
struct FrameSequence {
  std::vector<LumaPlane> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
};

/// Partition of a frame into non-overlapping patch_w x patch_h patches.
/// Border pixels beyond cols*patch_w (rows*patch_h) belong to no patch.
struct PatchGrid {
  int patch_w = 0;
  int patch_h = 0;
  int cols = 0;
  int rows = 0;

  int patch_count() const { return cols * rows; }
};

inline PatchGrid slice_grid(int frame_w, int frame_h, int patch_w, int patch_h) {
  if (patch_w < 1 || patch_h < 1)
    throw std::invalid_argument("patch dimensions must be positive");
  if (frame_w < 1 || frame_h < 1)
    throw std::invalid_argument("frame dimensions must be positive");
  if (patch_w > frame_w || patch_h > frame_h)
    throw std::invalid_argument("patch " + std::to_string(patch_w) + "x" +
                                std::to_string(patch_h) + " larger than frame " +
                                std::to_string(frame_w) + "x" + std::to_string(frame_h));
  PatchGrid grid;
  grid.patch_w = patch_w;
  grid.patch_h = patch_h;
  grid.cols = frame_w / patch_w;
  grid.rows = frame_h / patch_h;
  return grid;
}

/// A w x h block of real-valued samples, row-major. Pixel data is widened
/// to double on extraction; all downstream arithmetic stays in double.
struct RealBlock {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  double& at(int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

inline RealBlock extract_patch(const LumaPlane& plane, const PatchGrid& grid,
                               int row, int col) {
  if (row < 0 || row >= grid.rows || col < 0 || col >= grid.cols)
    throw std::out_of_range("patch index (" + std::to_string(row) + ", " +
                            std::to_string(col) + ") outside " +
                            std::to_string(grid.rows) + "x" +
                            std::to_string(grid.cols) + " grid");
  if (grid.cols * grid.patch_w > plane.width ||
      grid.rows * grid.patch_h > plane.height)
    throw std::invalid_argument("patch grid does not fit the given plane");

  RealBlock block;
  block.width = grid.patch_w;
  block.height = grid.patch_h;
  block.values.resize(static_cast<std::size_t>(grid.patch_w) * grid.patch_h);
  const int x0 = col * grid.patch_w;
  const int y0 = row * grid.patch_h;
  for (int y = 0; y < grid.patch_h; ++y) {
    const std::uint8_t* src =
        &plane.samples[static_cast<std::size_t>(y0 + y) * plane.width + x0];
    double* dst = &block.values[static_cast<std::size_t>(y) * grid.patch_w];
    for (int x = 0; x < grid.patch_w; ++x) dst[x] = static_cast<double>(src[x]);
  }
  return block;
}

}  // namespace eps
