#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "eps/features.hpp"
#include "eps/frame.hpp"

// Per-frame selection: cluster the frame's scores into N equal-width
// histogram bins over [min, max] and keep the patches in the top bin.
// Frame 1 uses SF alone; later frames take the intersection of the top SF
// and top TF bins, which may be empty.

namespace eps {

enum class Metric { SF, TF };

inline const char* metric_name(Metric m) { return m == Metric::SF ? "sf" : "tf"; }

/// Equal-width histogram partition of one frame's scores.
/// Bin k (1-based) spans [edges[k-1], edges[k]); the right edge of bin
/// n_clusters is closed so the maximum always lands in the top bin.
/// A degenerate range (min == max) puts every patch in the top bin.
struct Clustering {
  int n_clusters = 1;
  Metric metric = Metric::SF;
  std::vector<double> edges;    // n_clusters + 1 ascending values
  std::vector<int> assignment;  // 1..n_clusters, aligned with the input order

  /// Lower edge of the top bin; membership there is exactly score >= this.
  double top_threshold() const { return edges[edges.size() - 2]; }
};

inline Clustering cluster_histogram(std::span<const double> scores, int n_clusters,
                                    Metric metric = Metric::SF) {
  if (scores.empty())
    throw std::invalid_argument("cluster_histogram: empty score list");
  if (n_clusters < 1)
    throw std::invalid_argument("cluster_histogram: n_clusters must be >= 1");
  double lo = scores[0], hi = scores[0];
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("cluster_histogram: NaN score");
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }

  Clustering clustering;
  clustering.n_clusters = n_clusters;
  clustering.metric = metric;
  clustering.edges.resize(static_cast<std::size_t>(n_clusters) + 1);
  const double bin_width = (hi - lo) / n_clusters;
  for (int k = 0; k <= n_clusters; ++k)
    clustering.edges[static_cast<std::size_t>(k)] = lo + k * bin_width;
  clustering.edges.back() = hi;

  clustering.assignment.resize(scores.size());
  if (lo == hi) {
    // No evidence to discard anything: everything is top-bin.
    std::fill(clustering.assignment.begin(), clustering.assignment.end(), n_clusters);
    return clustering;
  }
  for (std::size_t p = 0; p < scores.size(); ++p) {
    // Bin membership is defined by the edges themselves, so "in bin N" and
    // "score >= edges[N-1]" can never disagree.
    int bin = 1;
    while (bin < n_clusters && scores[p] >= clustering.edges[static_cast<std::size_t>(bin)])
      ++bin;
    clustering.assignment[p] = bin;
  }
  return clustering;
}

struct GridCoord {
  int row = 0;
  int col = 0;
  auto operator<=>(const GridCoord&) const = default;
};

/// Patches selected from one frame, with the top-bin thresholds that
/// produced them. Thresholds are absent for the baseline methods and
/// tf_threshold is absent on frame 1.
struct FrameSelection {
  int frame = 1;
  std::vector<GridCoord> selected;  // sorted ascending by (row, col)
  std::optional<double> sf_threshold;
  std::optional<double> tf_threshold;
};

inline FrameSelection select_frame(const ScoreField& field, int n_clusters) {
  if (field.scores.empty())
    throw std::invalid_argument("select_frame: empty score field");
  const bool temporal = field.frame > 1;
  for (const PatchScore& score : field.scores)
    if (score.tf.has_value() != temporal)
      throw std::invalid_argument("select_frame: inconsistent tf presence in frame " +
                                  std::to_string(field.frame));

  std::vector<double> sf_scores;
  sf_scores.reserve(field.scores.size());
  for (const PatchScore& score : field.scores) sf_scores.push_back(score.sf);
  const Clustering sf_clusters = cluster_histogram(sf_scores, n_clusters, Metric::SF);

  FrameSelection selection;
  selection.frame = field.frame;
  selection.sf_threshold = sf_clusters.top_threshold();

  if (!temporal) {
    for (const PatchScore& score : field.scores)
      if (score.sf >= *selection.sf_threshold)
        selection.selected.push_back({score.row, score.col});
  } else {
    std::vector<double> tf_scores;
    tf_scores.reserve(field.scores.size());
    for (const PatchScore& score : field.scores) tf_scores.push_back(*score.tf);
    const Clustering tf_clusters = cluster_histogram(tf_scores, n_clusters, Metric::TF);
    selection.tf_threshold = tf_clusters.top_threshold();
    for (const PatchScore& score : field.scores)
      if (score.sf >= *selection.sf_threshold && *score.tf >= *selection.tf_threshold)
        selection.selected.push_back({score.row, score.col});
  }
  std::sort(selection.selected.begin(), selection.selected.end());
  return selection;
}

enum class Method { eps, random, top_fraction };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::eps: return "eps";
    case Method::random: return "random";
    case Method::top_fraction: return "top-fraction";
  }
  return "?";
}

struct SamplerConfig {
  int patch_w = 64;
  int patch_h = 64;
  int n_clusters = 2;
  Method method = Method::eps;
  std::optional<double> fraction;      // random / top-fraction only
  std::optional<std::uint64_t> seed;   // random only
};

inline void validate_config(const SamplerConfig& config) {
  if (config.patch_w < 1 || config.patch_h < 1)
    throw std::invalid_argument("sampler config: patch dimensions must be positive");
  if (config.n_clusters < 1)
    throw std::invalid_argument("sampler config: n_clusters must be >= 1");
  const bool needs_fraction = config.method != Method::eps;
  if (needs_fraction != config.fraction.has_value())
    throw std::invalid_argument(needs_fraction
                                    ? "sampler config: method requires a fraction"
                                    : "sampler config: fraction is only valid for baseline methods");
  if (config.fraction && (*config.fraction <= 0.0 || *config.fraction > 1.0))
    throw std::invalid_argument("sampler config: fraction must be in (0, 1]");
  if ((config.method == Method::random) != config.seed.has_value())
    throw std::invalid_argument(config.method == Method::random
                                    ? "sampler config: random method requires a seed"
                                    : "sampler config: seed is only valid for the random method");
}

struct SelectionStats {
  std::int64_t total_candidates = 0;
  std::int64_t total_selected = 0;
  double fraction = 0.0;
  int per_frame_min = 0;
  int per_frame_max = 0;
  double per_frame_mean = 0.0;
};

/// Where the frames came from; echoed into the manifest so a reader can
/// locate the patches. Filled by the caller (the library never re-opens it).
struct InputDescriptor {
  std::string path;
  std::string format;
  int width = 0;
  int height = 0;
  int frame_count = 0;
  std::optional<std::pair<int, int>> range;  // 1-based inclusive source range
};

struct SelectionManifest {
  SamplerConfig config;
  InputDescriptor input;
  PatchGrid grid;
  std::vector<FrameSelection> frames;
  std::vector<std::vector<PatchScore>> scores;  // per frame; nonempty iff scores embedded
  SelectionStats stats;
};

inline SelectionStats compute_stats(const std::vector<FrameSelection>& frames,
                                    int patches_per_frame) {
  SelectionStats stats;
  stats.total_candidates =
      static_cast<std::int64_t>(frames.size()) * patches_per_frame;
  int lo = std::numeric_limits<int>::max();
  int hi = 0;
  for (const FrameSelection& frame : frames) {
    const int n = static_cast<int>(frame.selected.size());
    stats.total_selected += n;
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  stats.per_frame_min = frames.empty() ? 0 : lo;
  stats.per_frame_max = hi;
  if (!frames.empty()) {
    stats.per_frame_mean =
        static_cast<double>(stats.total_selected) / static_cast<double>(frames.size());
    stats.fraction = static_cast<double>(stats.total_selected) /
                     static_cast<double>(stats.total_candidates);
  }
  return stats;
}

/// Full selection pass: score every frame (frame t against frame t-1),
/// cluster, select. Deterministic for any thread count.
inline SelectionManifest sample_video(const FrameSequence& sequence,
                                      const SamplerConfig& config,
                                      unsigned threads = 1,
                                      bool emit_scores = false) {
  validate_config(config);
  if (config.method != Method::eps)
    throw std::invalid_argument("sample_video: config method must be eps");
  if (sequence.frames.empty())
    throw std::invalid_argument("sample_video: empty frame sequence");

  SelectionManifest manifest;
  manifest.config = config;
  manifest.grid = slice_grid(sequence.width(), sequence.height(),
                             config.patch_w, config.patch_h);
  manifest.frames.reserve(sequence.frames.size());
  const int frame_count = sequence.frame_count();
  for (int t = 1; t <= frame_count; ++t) {
    const LumaPlane* previous =
        t > 1 ? &sequence.frames[static_cast<std::size_t>(t) - 2] : nullptr;
    ScoreField field = score_frame(sequence.frames[static_cast<std::size_t>(t) - 1],
                                   previous, manifest.grid, t, threads);
    manifest.frames.push_back(select_frame(field, config.n_clusters));
    if (emit_scores) manifest.scores.push_back(std::move(field.scores));
  }
  manifest.stats = compute_stats(manifest.frames, manifest.grid.patch_count());
  return manifest;
}

namespace detail {

// Unbiased bounded draw on top of the raw 64-bit stream; the rejection
// scheme is part of the manifest reproducibility contract.
inline std::uint64_t bounded_rand(std::mt19937_64& gen, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
  std::uint64_t r = gen();
  while (r >= limit) r = gen();
  return r % n;
}

}  // namespace detail

/// Baseline: per frame, round(fraction * patches) distinct cells drawn
/// uniformly from one mt19937_64 stream. Same seed, same manifest.
inline SelectionManifest sample_random(const PatchGrid& grid, int frame_count,
                                       double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction > 1.0)
    throw std::invalid_argument("sample_random: fraction must be in (0, 1]");
  if (frame_count < 1)
    throw std::invalid_argument("sample_random: frame_count must be >= 1");

  const int total = grid.patch_count();
  const int take = static_cast<int>(std::llround(fraction * total));

  SelectionManifest manifest;
  manifest.config.patch_w = grid.patch_w;
  manifest.config.patch_h = grid.patch_h;
  manifest.config.method = Method::random;
  manifest.config.fraction = fraction;
  manifest.config.seed = seed;
  manifest.grid = grid;

  std::mt19937_64 gen(seed);
  std::vector<int> cells(static_cast<std::size_t>(total));
  for (int t = 1; t <= frame_count; ++t) {
    for (int c = 0; c < total; ++c) cells[static_cast<std::size_t>(c)] = c;
    FrameSelection selection;
    selection.frame = t;
    for (int k = 0; k < take; ++k) {
      const int swap_from =
          k + static_cast<int>(detail::bounded_rand(gen, static_cast<std::uint64_t>(total - k)));
      std::swap(cells[static_cast<std::size_t>(k)], cells[static_cast<std::size_t>(swap_from)]);
      selection.selected.push_back(
          {cells[static_cast<std::size_t>(k)] / grid.cols,
           cells[static_cast<std::size_t>(k)] % grid.cols});
    }
    std::sort(selection.selected.begin(), selection.selected.end());
    manifest.frames.push_back(std::move(selection));
  }
  manifest.stats = compute_stats(manifest.frames, total);
  return manifest;
}

/// Baseline: per frame, the ceil(fraction * patches) highest-SF patches,
/// ties broken by ascending (row, col).
inline SelectionManifest sample_top_fraction(const std::vector<ScoreField>& fields,
                                             double fraction) {
  if (fraction <= 0.0 || fraction > 1.0)
    throw std::invalid_argument("sample_top_fraction: fraction must be in (0, 1]");
  if (fields.empty())
    throw std::invalid_argument("sample_top_fraction: no score fields");

  SelectionManifest manifest;
  manifest.config.patch_w = fields.front().grid.patch_w;
  manifest.config.patch_h = fields.front().grid.patch_h;
  manifest.config.method = Method::top_fraction;
  manifest.config.fraction = fraction;
  manifest.grid = fields.front().grid;

  for (const ScoreField& field : fields) {
    if (field.scores.empty())
      throw std::invalid_argument("sample_top_fraction: empty score field");
    const int total = static_cast<int>(field.scores.size());
    const int take = static_cast<int>(
        std::ceil(fraction * static_cast<double>(total)));
    std::vector<const PatchScore*> order;
    order.reserve(field.scores.size());
    for (const PatchScore& score : field.scores) order.push_back(&score);
    std::sort(order.begin(), order.end(), [](const PatchScore* a, const PatchScore* b) {
      if (a->sf != b->sf) return a->sf > b->sf;
      if (a->row != b->row) return a->row < b->row;
      return a->col < b->col;
    });

    FrameSelection selection;
    selection.frame = field.frame;
    for (int k = 0; k < take && k < total; ++k)
      selection.selected.push_back({order[static_cast<std::size_t>(k)]->row,
                                    order[static_cast<std::size_t>(k)]->col});
    std::sort(selection.selected.begin(), selection.selected.end());
    manifest.frames.push_back(std::move(selection));
  }
  manifest.stats = compute_stats(manifest.frames, manifest.grid.patch_count());
  return manifest;
}

}  // namespace eps
