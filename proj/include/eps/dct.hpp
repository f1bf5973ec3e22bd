#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "eps/frame.hpp"

// Orthonormal type-II 2D DCT.
//
//   coeffs(i,j) = a(i) a(j) sum_x sum_y patch(x,y)
//                 * cos[pi (2x+1) i / (2w)] * cos[pi (2y+1) j / (2h)]
//
// with a(0) = sqrt(1/n) and a(k>0) = sqrt(2/n) along an axis of length n.
// i is the horizontal frequency (0..w-1), j the vertical one (0..h-1).
// No level shift is applied: it would only move the DC term, which the
// feature definitions zero out anyway.
//
// The separable direct evaluation is O(w*h*(w+h)) per patch; plenty for
// 64x64 grids. An FFT-based fast path is a possible later optimization.

namespace eps {

/// DCT coefficients of one patch, row-major, indexed at(i, j) with
/// i = horizontal frequency and j = vertical frequency.
struct CoefficientBlock {
  int width = 0;
  int height = 0;
  std::vector<double> coeffs;

  double at(int i, int j) const {
    return coeffs[static_cast<std::size_t>(j) * width + i];
  }
  double& at(int i, int j) {
    return coeffs[static_cast<std::size_t>(j) * width + i];
  }
};

namespace detail {

// basis[k*n + x] = a(k) * cos(pi * (2x+1) * k / (2n))
inline std::vector<double> make_cosine_basis(int n) {
  std::vector<double> basis(static_cast<std::size_t>(n) * n);
  const double a0 = std::sqrt(1.0 / n);
  const double ak = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k) {
    const double scale = (k == 0) ? a0 : ak;
    for (int x = 0; x < n; ++x) {
      basis[static_cast<std::size_t>(k) * n + x] =
          scale * std::cos(std::numbers::pi * (2 * x + 1) * k / (2.0 * n));
    }
  }
  return basis;
}

inline const std::vector<double>& cosine_basis(int n) {
  static std::mutex mutex;
  static std::map<int, std::vector<double>> cache;  // node-based: stable refs
  std::scoped_lock lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_cosine_basis(n)).first;
  return it->second;
}

inline void check_input(const RealBlock& patch) {
  if (patch.width < 1 || patch.height < 1)
    throw std::invalid_argument("dct2d: block dimensions must be positive");
  if (patch.values.size() !=
      static_cast<std::size_t>(patch.width) * patch.height)
    throw std::invalid_argument("dct2d: value count does not match dimensions");
  for (double v : patch.values)
    if (!std::isfinite(v)) throw std::invalid_argument("dct2d: non-finite input");
}

}  // namespace detail

/// Separable row-column evaluation. The reduction order is fixed (row pass
/// then column pass, each sum over ascending index), so results are
/// bit-identical regardless of cross-patch parallelism.
inline CoefficientBlock dct2d(const RealBlock& patch) {
  detail::check_input(patch);
  const int w = patch.width;
  const int h = patch.height;
  const std::vector<double>& basis_w = detail::cosine_basis(w);
  const std::vector<double>& basis_h = detail::cosine_basis(h);

  // Row pass: horizontal frequencies per image row.
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const double* row = &patch.values[static_cast<std::size_t>(y) * w];
    for (int i = 0; i < w; ++i) {
      const double* b = &basis_w[static_cast<std::size_t>(i) * w];
      double acc = 0.0;
      for (int x = 0; x < w; ++x) acc += b[x] * row[x];
      tmp[static_cast<std::size_t>(y) * w + i] = acc;
    }
  }

  // Column pass: vertical frequencies, accumulated over y in ascending order.
  CoefficientBlock out;
  out.width = w;
  out.height = h;
  out.coeffs.assign(static_cast<std::size_t>(w) * h, 0.0);
  for (int j = 0; j < h; ++j) {
    double* dst = &out.coeffs[static_cast<std::size_t>(j) * w];
    const double* b = &basis_h[static_cast<std::size_t>(j) * h];
    for (int y = 0; y < h; ++y) {
      const double s = b[y];
      const double* src = &tmp[static_cast<std::size_t>(y) * w];
      for (int i = 0; i < w; ++i) dst[i] += s * src[i];
    }
  }
  return out;
}

/// Direct quadruple-loop evaluation of the same transform, O((wh)^2), with
/// compensated summation. Test oracle and `oracle-check` backend only.
inline CoefficientBlock dct2d_naive(const RealBlock& patch) {
  detail::check_input(patch);
  const int w = patch.width;
  const int h = patch.height;
  const double a0w = std::sqrt(1.0 / w), akw = std::sqrt(2.0 / w);
  const double a0h = std::sqrt(1.0 / h), akh = std::sqrt(2.0 / h);

  // Raw cosine tables (no alpha), cw[i*w+x], ch[j*h+y].
  std::vector<double> cw(static_cast<std::size_t>(w) * w);
  std::vector<double> ch(static_cast<std::size_t>(h) * h);
  for (int i = 0; i < w; ++i)
    for (int x = 0; x < w; ++x)
      cw[static_cast<std::size_t>(i) * w + x] =
          std::cos(std::numbers::pi * (2 * x + 1) * i / (2.0 * w));
  for (int j = 0; j < h; ++j)
    for (int y = 0; y < h; ++y)
      ch[static_cast<std::size_t>(j) * h + y] =
          std::cos(std::numbers::pi * (2 * y + 1) * j / (2.0 * h));

  CoefficientBlock out;
  out.width = w;
  out.height = h;
  out.coeffs.resize(static_cast<std::size_t>(w) * h);
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < h; ++j) {
      double sum = 0.0, comp = 0.0;  // Kahan
      for (int x = 0; x < w; ++x) {
        const double cx = cw[static_cast<std::size_t>(i) * w + x];
        for (int y = 0; y < h; ++y) {
          const double term = patch.at(x, y) * cx * ch[static_cast<std::size_t>(j) * h + y];
          const double t1 = term - comp;
          const double t2 = sum + t1;
          comp = (t2 - sum) - t1;
          sum = t2;
        }
      }
      const double ai = (i == 0) ? a0w : akw;
      const double aj = (j == 0) ? a0h : akh;
      out.at(i, j) = ai * aj * sum;
    }
  }
  return out;
}

/// Forces the DC term to exactly zero; everything else unchanged. Idempotent.
inline CoefficientBlock masked(CoefficientBlock block) {
  if (block.coeffs.empty())
    throw std::invalid_argument("masked: empty coefficient block");
  block.coeffs[0] = 0.0;
  return block;
}

}  // namespace eps
