#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "eps/sampler.hpp"

// Manifest v1: line-oriented text, one logical record per line, canonical
// key order, scores printed with 9 significant digits. Two identical
// manifests serialize to byte-identical files.
//
//   eps-manifest v1
//   config method eps
//   config patch_w 64
//   config patch_h 64
//   config clusters 2          (eps)
//   config fraction 0.175      (random, top-fraction)
//   config seed 7              (random)
//   config input <path>        (when known)
//   config format y4m          (when known)
//   config width 960           (when known)
//   config height 540
//   config frames 30
//   config range 11 40         (when a sub-range was sampled)
//   grid cols 15
//   grid rows 8
//   frame 1
//   sf_threshold 1234.56789    (or -)
//   tf_threshold -             (- on frame 1 and for baselines)
//   select <row> <col>         (sorted ascending by row, col)
//   score <row> <col> <sf> <tf|->   (all cells, row-major; only with --emit-scores)
//   ...
//   stats total_candidates 3600
//   stats total_selected 42
//   stats fraction 0.0116666667
//   stats per_frame_min 0
//   stats per_frame_max 21
//   stats per_frame_mean 1.4

namespace eps {

inline std::string format_score(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

namespace detail {

inline std::string opt_score(const std::optional<double>& value) {
  return value ? format_score(*value) : "-";
}

}  // namespace detail

inline std::string manifest_to_text(const SelectionManifest& manifest) {
  std::string out;
  out.reserve(4096 + manifest.frames.size() * 64);
  auto line = [&out](std::initializer_list<std::string_view> parts) {
    bool first = true;
    for (std::string_view part : parts) {
      if (!first) out += ' ';
      out += part;
      first = false;
    }
    out += '\n';
  };

  line({"eps-manifest", "v1"});
  line({"config", "method", method_name(manifest.config.method)});
  line({"config", "patch_w", std::to_string(manifest.config.patch_w)});
  line({"config", "patch_h", std::to_string(manifest.config.patch_h)});
  if (manifest.config.method == Method::eps)
    line({"config", "clusters", std::to_string(manifest.config.n_clusters)});
  if (manifest.config.fraction)
    line({"config", "fraction", format_score(*manifest.config.fraction)});
  if (manifest.config.seed)
    line({"config", "seed", std::to_string(*manifest.config.seed)});
  if (!manifest.input.path.empty()) line({"config", "input", manifest.input.path});
  if (!manifest.input.format.empty()) line({"config", "format", manifest.input.format});
  if (manifest.input.width > 0 && manifest.input.height > 0) {
    line({"config", "width", std::to_string(manifest.input.width)});
    line({"config", "height", std::to_string(manifest.input.height)});
  }
  line({"config", "frames", std::to_string(manifest.frames.size())});
  if (manifest.input.range)
    line({"config", "range", std::to_string(manifest.input.range->first),
          std::to_string(manifest.input.range->second)});
  line({"grid", "cols", std::to_string(manifest.grid.cols)});
  line({"grid", "rows", std::to_string(manifest.grid.rows)});

  for (std::size_t f = 0; f < manifest.frames.size(); ++f) {
    const FrameSelection& frame = manifest.frames[f];
    line({"frame", std::to_string(frame.frame)});
    line({"sf_threshold", detail::opt_score(frame.sf_threshold)});
    line({"tf_threshold", detail::opt_score(frame.tf_threshold)});
    for (const GridCoord& coord : frame.selected)
      line({"select", std::to_string(coord.row), std::to_string(coord.col)});
    if (f < manifest.scores.size()) {
      for (const PatchScore& score : manifest.scores[f])
        line({"score", std::to_string(score.row), std::to_string(score.col),
              format_score(score.sf), detail::opt_score(score.tf)});
    }
  }

  line({"stats", "total_candidates", std::to_string(manifest.stats.total_candidates)});
  line({"stats", "total_selected", std::to_string(manifest.stats.total_selected)});
  line({"stats", "fraction", format_score(manifest.stats.fraction)});
  line({"stats", "per_frame_min", std::to_string(manifest.stats.per_frame_min)});
  line({"stats", "per_frame_max", std::to_string(manifest.stats.per_frame_max)});
  line({"stats", "per_frame_mean", format_score(manifest.stats.per_frame_mean)});
  return out;
}

inline void write_manifest(const SelectionManifest& manifest,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  const std::string text = manifest_to_text(manifest);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Parse failure; what() carries the 1-based line number.
class ManifestError : public std::runtime_error {
 public:
  ManifestError(std::size_t line, const std::string& message)
      : std::runtime_error("manifest line " + std::to_string(line) + ": " + message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

struct ManifestParser {
  std::istream& in;
  std::size_t line_no = 0;
  std::string line;

  bool next_line() {
    if (!std::getline(in, line)) return false;
    ++line_no;
    return true;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ManifestError(line_no, message);
  }

  static std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t next = text.find(' ', pos);
      if (next == std::string::npos) {
        tokens.push_back(text.substr(pos));
        break;
      }
      tokens.push_back(text.substr(pos, next - pos));
      pos = next + 1;
    }
    return tokens;
  }

  long long parse_int(const std::string& token) const {
    std::size_t used = 0;
    long long value = 0;
    try {
      value = std::stoll(token, &used);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + token + "'");
    }
    if (used != token.size()) fail("expected an integer, got '" + token + "'");
    return value;
  }

  double parse_number(const std::string& token) const {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      fail("expected a number, got '" + token + "'");
    }
    if (used != token.size() || std::isnan(value))
      fail("expected a number, got '" + token + "'");
    return value;
  }

  std::optional<double> parse_opt(const std::string& token) const {
    if (token == "-") return std::nullopt;
    return parse_number(token);
  }
};

}  // namespace detail

inline SelectionManifest parse_manifest_text(std::istream& in) {
  detail::ManifestParser p{in, 0, {}};
  if (!p.next_line() || p.line != "eps-manifest v1") {
    p.line_no = p.line_no ? p.line_no : 1;
    p.fail("unrecognized manifest version");
  }

  SelectionManifest manifest;
  bool have_method = false, have_cols = false, have_rows = false;
  bool in_frames = false, in_stats = false;
  bool stats_seen[6] = {};
  FrameSelection* frame = nullptr;
  std::vector<PatchScore>* frame_scores = nullptr;
  int threshold_lines = 0;

  while (p.next_line()) {
    const std::vector<std::string> tok = detail::ManifestParser::split(p.line);
    if (tok.empty()) p.fail("blank line");
    const std::string& kind = tok[0];

    if (kind == "config") {
      if (in_frames || in_stats) p.fail("config line after the config block");
      if (tok.size() < 3) p.fail("truncated config line");
      const std::string& key = tok[1];
      if (key == "method") {
        const std::string& name = tok[2];
        if (name == "eps") manifest.config.method = Method::eps;
        else if (name == "random") manifest.config.method = Method::random;
        else if (name == "top-fraction") manifest.config.method = Method::top_fraction;
        else p.fail("unknown method '" + name + "'");
        have_method = true;
      } else if (key == "patch_w") {
        manifest.config.patch_w = static_cast<int>(p.parse_int(tok[2]));
      } else if (key == "patch_h") {
        manifest.config.patch_h = static_cast<int>(p.parse_int(tok[2]));
      } else if (key == "clusters") {
        manifest.config.n_clusters = static_cast<int>(p.parse_int(tok[2]));
      } else if (key == "fraction") {
        manifest.config.fraction = p.parse_number(tok[2]);
      } else if (key == "seed") {
        manifest.config.seed = static_cast<std::uint64_t>(p.parse_int(tok[2]));
      } else if (key == "input") {
        manifest.input.path = p.line.substr(std::string("config input ").size());
      } else if (key == "format") {
        manifest.input.format = tok[2];
      } else if (key == "width") {
        manifest.input.width = static_cast<int>(p.parse_int(tok[2]));
      } else if (key == "height") {
        manifest.input.height = static_cast<int>(p.parse_int(tok[2]));
      } else if (key == "frames") {
        manifest.input.frame_count = static_cast<int>(p.parse_int(tok[2]));
      } else if (key == "range") {
        if (tok.size() != 4) p.fail("range expects two values");
        manifest.input.range = {static_cast<int>(p.parse_int(tok[2])),
                                static_cast<int>(p.parse_int(tok[3]))};
      } else {
        p.fail("unknown config key '" + key + "'");
      }
    } else if (kind == "grid") {
      if (in_frames || in_stats) p.fail("grid line after the config block");
      if (tok.size() != 3) p.fail("malformed grid line");
      if (tok[1] == "cols") {
        manifest.grid.cols = static_cast<int>(p.parse_int(tok[2]));
        have_cols = true;
      } else if (tok[1] == "rows") {
        manifest.grid.rows = static_cast<int>(p.parse_int(tok[2]));
        have_rows = true;
      } else {
        p.fail("unknown grid key '" + tok[1] + "'");
      }
    } else if (kind == "frame") {
      if (in_stats) p.fail("frame block after stats");
      if (!have_method || !have_cols || !have_rows)
        p.fail("frame block before a complete config block");
      if (frame && threshold_lines != 2) p.fail("frame block missing threshold lines");
      if (tok.size() != 2) p.fail("malformed frame line");
      const int index = static_cast<int>(p.parse_int(tok[1]));
      const int expected = static_cast<int>(manifest.frames.size()) + 1;
      if (index != expected)
        p.fail("frame index " + std::to_string(index) + ", expected " +
               std::to_string(expected));
      in_frames = true;
      manifest.frames.emplace_back();
      frame = &manifest.frames.back();
      frame->frame = index;
      frame_scores = nullptr;
      threshold_lines = 0;
    } else if (kind == "sf_threshold" || kind == "tf_threshold") {
      if (!frame) p.fail("threshold line outside a frame block");
      if (tok.size() != 2) p.fail("malformed threshold line");
      if (!frame->selected.empty() || frame_scores)
        p.fail("threshold line after select/score lines");
      if (kind == "sf_threshold") {
        if (threshold_lines != 0) p.fail("unexpected sf_threshold");
        frame->sf_threshold = p.parse_opt(tok[1]);
      } else {
        if (threshold_lines != 1) p.fail("unexpected tf_threshold");
        frame->tf_threshold = p.parse_opt(tok[1]);
      }
      ++threshold_lines;
    } else if (kind == "select") {
      if (!frame || threshold_lines != 2) p.fail("select line outside a frame block");
      if (frame_scores) p.fail("select line after score lines");
      if (tok.size() != 3) p.fail("malformed select line");
      GridCoord coord{static_cast<int>(p.parse_int(tok[1])),
                      static_cast<int>(p.parse_int(tok[2]))};
      if (coord.row < 0 || coord.row >= manifest.grid.rows || coord.col < 0 ||
          coord.col >= manifest.grid.cols)
        p.fail("selected patch outside the grid");
      if (!frame->selected.empty() && !(frame->selected.back() < coord))
        p.fail("select lines not sorted by (row, col)");
      frame->selected.push_back(coord);
    } else if (kind == "score") {
      if (!frame || threshold_lines != 2) p.fail("score line outside a frame block");
      if (tok.size() != 5) p.fail("malformed score line");
      if (!frame_scores) {
        if (manifest.scores.size() != manifest.frames.size() - 1)
          p.fail("score lines missing for an earlier frame");
        manifest.scores.emplace_back();
        frame_scores = &manifest.scores.back();
      }
      PatchScore score;
      score.frame = frame->frame;
      score.row = static_cast<int>(p.parse_int(tok[1]));
      score.col = static_cast<int>(p.parse_int(tok[2]));
      score.sf = p.parse_number(tok[3]);
      score.tf = p.parse_opt(tok[4]);
      const int expected = static_cast<int>(frame_scores->size());
      if (score.row != expected / manifest.grid.cols ||
          score.col != expected % manifest.grid.cols)
        p.fail("score lines must cover the grid row-major");
      frame_scores->push_back(score);
    } else if (kind == "stats") {
      if (manifest.frames.empty()) p.fail("stats before any frame block");
      if (frame && threshold_lines != 2) p.fail("frame block missing threshold lines");
      frame = nullptr;
      in_stats = true;
      if (tok.size() != 3) p.fail("malformed stats line");
      const std::string& key = tok[1];
      int slot = -1;
      if (key == "total_candidates") {
        manifest.stats.total_candidates = p.parse_int(tok[2]);
        slot = 0;
      } else if (key == "total_selected") {
        manifest.stats.total_selected = p.parse_int(tok[2]);
        slot = 1;
      } else if (key == "fraction") {
        manifest.stats.fraction = p.parse_number(tok[2]);
        slot = 2;
      } else if (key == "per_frame_min") {
        manifest.stats.per_frame_min = static_cast<int>(p.parse_int(tok[2]));
        slot = 3;
      } else if (key == "per_frame_max") {
        manifest.stats.per_frame_max = static_cast<int>(p.parse_int(tok[2]));
        slot = 4;
      } else if (key == "per_frame_mean") {
        manifest.stats.per_frame_mean = p.parse_number(tok[2]);
        slot = 5;
      } else {
        p.fail("unknown stats key '" + key + "'");
      }
      if (stats_seen[slot]) p.fail("duplicate stats key '" + key + "'");
      stats_seen[slot] = true;
    } else {
      p.fail("unrecognized record '" + kind + "'");
    }
  }

  for (bool seen : stats_seen)
    if (!seen) throw ManifestError(p.line_no, "incomplete stats block");
  if (manifest.frames.empty()) throw ManifestError(p.line_no, "manifest has no frames");
  if (manifest.input.frame_count != static_cast<int>(manifest.frames.size()))
    throw ManifestError(p.line_no, "config frames does not match the frame blocks");
  if (!manifest.scores.empty() && manifest.scores.size() != manifest.frames.size())
    throw ManifestError(p.line_no, "score lines missing for the last frames");

  // Cross-check the stats block against the frame blocks.
  const SelectionStats expect =
      compute_stats(manifest.frames, manifest.grid.patch_count());
  if (manifest.stats.total_candidates != expect.total_candidates)
    throw ManifestError(p.line_no, "stats total_candidates does not match grid and frame count");
  if (manifest.stats.total_selected != expect.total_selected)
    throw ManifestError(p.line_no, "stats total_selected does not match select lines");
  if (std::abs(manifest.stats.fraction - expect.fraction) > 1e-8)
    throw ManifestError(p.line_no, "stats fraction does not match select lines");
  return manifest;
}

inline SelectionManifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_manifest_text(in);
}

/// Human-readable report: per-frame selected counts and thresholds, overall
/// fraction as a percentage with two decimals.
inline std::string summarize(const SelectionManifest& manifest) {
  std::ostringstream out;
  const InputDescriptor& input = manifest.input;
  out << "patch selection summary\n";
  if (!input.path.empty()) {
    out << "input: " << input.path;
    if (!input.format.empty()) out << " (" << input.format;
    if (input.width > 0) out << ", " << input.width << "x" << input.height;
    out << ", " << manifest.frames.size() << " frames";
    if (input.range)
      out << ", source frames " << input.range->first << "-" << input.range->second;
    if (!input.format.empty() || input.width > 0) out << ")";
    out << "\n";
  }
  out << "method: " << method_name(manifest.config.method) << ", patch "
      << manifest.config.patch_w << "x" << manifest.config.patch_h;
  if (manifest.config.method == Method::eps)
    out << ", clusters " << manifest.config.n_clusters;
  if (manifest.config.fraction) out << ", fraction " << format_score(*manifest.config.fraction);
  if (manifest.config.seed) out << ", seed " << *manifest.config.seed;
  out << "\n";
  out << "grid: " << manifest.grid.cols << " cols x " << manifest.grid.rows
      << " rows, " << manifest.grid.patch_count() << " patches/frame\n\n";

  out << "frame  selected  sf_threshold     tf_threshold\n";
  char buf[128];
  for (const FrameSelection& frame : manifest.frames) {
    std::snprintf(buf, sizeof buf, "%5d  %8zu  %-15s  %s\n", frame.frame,
                  frame.selected.size(),
                  detail::opt_score(frame.sf_threshold).c_str(),
                  detail::opt_score(frame.tf_threshold).c_str());
    out << buf;
  }
  std::snprintf(buf, sizeof buf,
                "\nselected %lld of %lld patches (%.2f %%), per frame min/mean/max = %d/%s/%d\n",
                static_cast<long long>(manifest.stats.total_selected),
                static_cast<long long>(manifest.stats.total_candidates),
                manifest.stats.fraction * 100.0, manifest.stats.per_frame_min,
                format_score(manifest.stats.per_frame_mean).c_str(),
                manifest.stats.per_frame_max);
  out << buf;
  return out.str();
}

}  // namespace eps
