// eps command line tool: sample training patches from a video, render
// score heatmaps, report manifest statistics, and cross-check the DCT
// kernels against the brute-force oracle.
//
// Exit codes: 0 success, 1 runtime/data error, 2 flag misuse.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eps/eps.hpp"

namespace {

// Flag misuse detected after CLI11 parsing; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputFlags {
  std::string path;
  std::string format;
  int width = 0;
  int height = 0;
  std::string frames;  // "A-B"
};

struct PatchFlags {
  int size = 0;
  int width = 64;
  int height = 64;
};

void add_input_flags(CLI::App* cmd, InputFlags& flags) {
  cmd->add_option("--input", flags.path, "input video (y4m / raw yuv / pgm directory)")
      ->required();
  cmd->add_option("--format", flags.format,
                  "input format: y4m, yuv420p8 or pgm-seq (default: inferred)")
      ->check(CLI::IsMember({"y4m", "yuv420p8", "pgm-seq"}));
  cmd->add_option("--width", flags.width, "frame width (raw yuv only)");
  cmd->add_option("--height", flags.height, "frame height (raw yuv only)");
  cmd->add_option("--frames", flags.frames, "1-based inclusive frame range A-B");
}

void add_patch_flags(CLI::App* cmd, PatchFlags& flags) {
  CLI::Option* size = cmd->add_option("--patch-size", flags.size,
                                      "square patch edge in pixels (default 64)");
  cmd->add_option("--patch-w", flags.width, "patch width in pixels")->excludes(size);
  cmd->add_option("--patch-h", flags.height, "patch height in pixels")->excludes(size);
}

std::optional<eps::FrameRange> parse_frame_range(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const std::size_t dash = text.find('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 >= text.size())
    throw UsageError("--frames expects a range A-B, got '" + text + "'");
  eps::FrameRange range;
  try {
    range.first = std::stoi(text.substr(0, dash));
    range.last = std::stoi(text.substr(dash + 1));
  } catch (const std::exception&) {
    throw UsageError("--frames expects a range A-B, got '" + text + "'");
  }
  if (range.first < 1 || range.last < range.first)
    throw UsageError("--frames range must satisfy 1 <= A <= B, got '" + text + "'");
  return range;
}

eps::InputFormat resolve_format(const InputFlags& flags) {
  if (!flags.format.empty()) {
    const auto format = eps::parse_format_name(flags.format);
    if (!format) throw UsageError("unknown format '" + flags.format + "'");
    return *format;
  }
  const auto format = eps::infer_format(flags.path);
  if (!format)
    throw UsageError("cannot infer format of '" + flags.path +
                     "'; pass --format y4m|yuv420p8|pgm-seq");
  return *format;
}

struct LoadedInput {
  eps::FrameSequence sequence;
  eps::InputDescriptor descriptor;
};

LoadedInput load_input(const InputFlags& flags) {
  const eps::InputFormat format = resolve_format(flags);
  std::optional<eps::RawDims> dims;
  if (format == eps::InputFormat::yuv420p8) {
    if (flags.width < 1 || flags.height < 1)
      throw UsageError("raw input requires dimensions (--width and --height)");
    dims = eps::RawDims{flags.width, flags.height};
  } else if (flags.width > 0 || flags.height > 0) {
    throw UsageError("--width/--height apply to raw yuv input only");
  }
  const std::optional<eps::FrameRange> range = parse_frame_range(flags.frames);

  LoadedInput input;
  input.sequence = eps::load_sequence(flags.path, format, dims, range);
  input.descriptor.path = flags.path;
  input.descriptor.format = eps::format_name(format);
  input.descriptor.width = input.sequence.width();
  input.descriptor.height = input.sequence.height();
  input.descriptor.frame_count = input.sequence.frame_count();
  if (range) input.descriptor.range = {range->first, range->last};
  return input;
}

int run_sample(const InputFlags& input_flags, const PatchFlags& patch_flags,
               const std::string& method_name, int clusters, double fraction,
               std::uint64_t seed, bool has_fraction, bool has_seed,
               const std::string& out_path, bool emit_scores, unsigned threads,
               bool quiet) {
  eps::SamplerConfig config;
  config.patch_w = patch_flags.size > 0 ? patch_flags.size : patch_flags.width;
  config.patch_h = patch_flags.size > 0 ? patch_flags.size : patch_flags.height;
  config.n_clusters = clusters;
  if (method_name == "eps") config.method = eps::Method::eps;
  else if (method_name == "random") config.method = eps::Method::random;
  else if (method_name == "top-fraction") config.method = eps::Method::top_fraction;
  else throw UsageError("unknown method '" + method_name + "'");
  if (has_fraction) config.fraction = fraction;
  if (has_seed) config.seed = seed;
  try {
    eps::validate_config(config);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (emit_scores && config.method == eps::Method::random)
    throw UsageError("--emit-scores requires a scoring method (eps or top-fraction)");

  LoadedInput input = load_input(input_flags);
  const eps::PatchGrid grid =
      eps::slice_grid(input.sequence.width(), input.sequence.height(),
                      config.patch_w, config.patch_h);

  eps::SelectionManifest manifest;
  switch (config.method) {
    case eps::Method::eps:
      manifest = eps::sample_video(input.sequence, config, threads, emit_scores);
      break;
    case eps::Method::random:
      manifest = eps::sample_random(grid, input.sequence.frame_count(),
                                    *config.fraction, *config.seed);
      break;
    case eps::Method::top_fraction: {
      std::vector<eps::ScoreField> fields;
      fields.reserve(static_cast<std::size_t>(input.sequence.frame_count()));
      for (int t = 1; t <= input.sequence.frame_count(); ++t)
        fields.push_back(eps::score_frame(
            input.sequence.frames[static_cast<std::size_t>(t) - 1], nullptr, grid, t,
            threads));
      manifest = eps::sample_top_fraction(fields, *config.fraction);
      if (emit_scores)
        for (eps::ScoreField& field : fields)
          manifest.scores.push_back(std::move(field.scores));
      break;
    }
  }
  manifest.input = input.descriptor;
  eps::write_manifest(manifest, out_path);
  if (!quiet) std::cout << eps::summarize(manifest);
  return 0;
}

int run_heatmap(const InputFlags& input_flags, const PatchFlags& patch_flags,
                const std::string& prefix, int upscale, unsigned threads) {
  LoadedInput input = load_input(input_flags);
  const int patch_w = patch_flags.size > 0 ? patch_flags.size : patch_flags.width;
  const int patch_h = patch_flags.size > 0 ? patch_flags.size : patch_flags.height;
  const eps::PatchGrid grid = eps::slice_grid(
      input.sequence.width(), input.sequence.height(), patch_w, patch_h);

  for (int t = 1; t <= input.sequence.frame_count(); ++t) {
    const eps::LumaPlane* previous =
        t > 1 ? &input.sequence.frames[static_cast<std::size_t>(t) - 2] : nullptr;
    const eps::ScoreField field = eps::score_frame(
        input.sequence.frames[static_cast<std::size_t>(t) - 1], previous, grid, t,
        threads);
    eps::write_heatmap(field, eps::Metric::SF,
                       prefix + "_f" + std::to_string(t) + "_sf.pgm", upscale);
    if (t > 1) {
      eps::write_heatmap(field, eps::Metric::TF,
                         prefix + "_f" + std::to_string(t) + "_tf.pgm", upscale);
    } else {
      std::cerr << "warning: skipping TF heatmap for frame 1 (no previous frame)\n";
    }
  }
  return 0;
}

int run_stats(const std::string& manifest_path) {
  const eps::SelectionManifest manifest = eps::parse_manifest(manifest_path);
  std::cout << eps::summarize(manifest);
  return 0;
}

struct OracleStats {
  double transform_dev = 0.0;  // dct2d vs dct2d_naive, absolute
  double parseval_dev = 0.0;   // energy conservation, relative
  double identity_dev = 0.0;   // tf vs sf-of-difference, absolute
};

eps::RealBlock random_pixel_block(std::mt19937_64& gen, int w, int h) {
  eps::RealBlock block;
  block.width = w;
  block.height = h;
  block.values.resize(static_cast<std::size_t>(w) * h);
  for (double& v : block.values)
    v = static_cast<double>(gen() % 256);
  return block;
}

int run_oracle_check(int trials, const std::vector<std::string>& size_specs,
                     std::uint64_t seed, bool inject_fault) {
  if (trials < 1) throw UsageError("--trials must be >= 1");
  std::vector<std::pair<int, int>> sizes;
  for (const std::string& spec : size_specs) {
    const std::size_t x = spec.find('x');
    int w = 0, h = 0;
    try {
      w = std::stoi(spec.substr(0, x));
      h = std::stoi(spec.substr(x + 1));
    } catch (const std::exception&) {
      w = 0;
    }
    if (x == std::string::npos || w < 1 || h < 1)
      throw UsageError("--sizes expects WxH entries, got '" + spec + "'");
    sizes.emplace_back(w, h);
  }

  std::printf("oracle-check: %d trials/size, seed %" PRIu64 "\n", trials, seed);
  OracleStats stats;
  std::mt19937_64 gen(seed);
  bool faulted = false;
  for (const auto& [w, h] : sizes) {
    for (int trial = 0; trial < trials; ++trial) {
      const eps::RealBlock a = random_pixel_block(gen, w, h);
      const eps::RealBlock b = random_pixel_block(gen, w, h);

      eps::CoefficientBlock fast = eps::dct2d(a);
      if (inject_fault && !faulted) {
        fast.coeffs.back() += 1e-6;  // negative control for the harness itself
        faulted = true;
      }
      const eps::CoefficientBlock slow = eps::dct2d_naive(a);
      for (std::size_t k = 0; k < fast.coeffs.size(); ++k)
        stats.transform_dev =
            std::max(stats.transform_dev, std::abs(fast.coeffs[k] - slow.coeffs[k]));

      double patch_energy = 0.0, coeff_energy = 0.0;
      for (double v : a.values) patch_energy += v * v;
      for (double c : fast.coeffs) coeff_energy += c * c;
      const double scale = patch_energy > 0.0 ? patch_energy : 1.0;
      stats.parseval_dev =
          std::max(stats.parseval_dev, std::abs(coeff_energy - patch_energy) / scale);

      const eps::CoefficientBlock ca = eps::masked(eps::dct2d(a));
      const eps::CoefficientBlock cb = eps::masked(eps::dct2d(b));
      eps::RealBlock diff = a;
      for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= b.values[k];
      const double tf = eps::temporal_feature(ca, cb);
      const double sf_of_diff = eps::spatial_feature(eps::masked(eps::dct2d(diff)));
      stats.identity_dev = std::max(stats.identity_dev, std::abs(tf - sf_of_diff));
    }
  }

  constexpr double kTolerance = 1e-9;
  std::printf("  dct2d vs dct2d_naive    max abs dev = %.3e\n", stats.transform_dev);
  std::printf("  parseval energy         max rel dev = %.3e\n", stats.parseval_dev);
  std::printf("  tf/sf difference        max abs dev = %.3e\n", stats.identity_dev);
  const bool pass = stats.transform_dev < kTolerance &&
                    stats.parseval_dev < kTolerance && stats.identity_dev < kTolerance;
  std::printf("%s (tolerance %.0e)\n", pass ? "PASS" : "FAIL", kTolerance);
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DCT-based spatio-temporal training-patch selection for video"};
  app.require_subcommand(1);

  // sample
  InputFlags sample_input;
  PatchFlags sample_patch;
  std::string method = "eps";
  int clusters = 2;
  double fraction = 0.0;
  std::uint64_t seed = 0;
  std::string out_path;
  bool emit_scores = false;
  bool quiet = false;
  unsigned threads = eps::default_thread_count();
  CLI::App* sample = app.add_subcommand(
      "sample", "select training patches and write a selection manifest");
  add_input_flags(sample, sample_input);
  add_patch_flags(sample, sample_patch);
  sample->add_option("--clusters", clusters, "number of histogram bins N (default 2)");
  sample->add_option("--method", method, "eps, random or top-fraction (default eps)")
      ->check(CLI::IsMember({"eps", "random", "top-fraction"}));
  CLI::Option* fraction_opt =
      sample->add_option("--fraction", fraction, "selected fraction r in (0,1] (baselines)");
  CLI::Option* seed_opt =
      sample->add_option("--seed", seed, "random baseline generator seed");
  sample->add_option("--out", out_path, "manifest output path")->required();
  sample->add_flag("--emit-scores", emit_scores, "embed per-patch sf/tf values");
  sample->add_option("--threads", threads, "worker threads (default: hardware)");
  sample->add_flag("--quiet", quiet, "suppress the summary report");

  // heatmap
  InputFlags heatmap_input;
  PatchFlags heatmap_patch;
  std::string heatmap_prefix;
  int upscale = 1;
  unsigned heatmap_threads = eps::default_thread_count();
  CLI::App* heatmap = app.add_subcommand(
      "heatmap", "render per-frame SF/TF score heatmaps as PGM images");
  add_input_flags(heatmap, heatmap_input);
  add_patch_flags(heatmap, heatmap_patch);
  heatmap->add_option("--heatmap-prefix", heatmap_prefix, "output path prefix")
      ->required();
  heatmap->add_option("--upscale", upscale, "repeat each pixel n x n (default 1)")
      ->check(CLI::PositiveNumber);
  heatmap->add_option("--threads", heatmap_threads, "worker threads (default: hardware)");

  // stats
  std::string manifest_path;
  CLI::App* stats = app.add_subcommand(
      "stats", "summarize an existing manifest without rescoring the video");
  stats->add_option("--manifest", manifest_path, "manifest file to read")->required();

  // oracle-check
  int trials = 100;
  std::vector<std::string> size_specs = {"4x4", "8x8", "16x16", "64x64", "16x8"};
  std::uint64_t oracle_seed = 1;
  bool inject_fault = false;
  CLI::App* oracle = app.add_subcommand(
      "oracle-check", "cross-check dct2d against the brute-force oracle");
  oracle->add_option("--trials", trials, "random blocks per size (default 100)");
  oracle->add_option("--sizes", size_specs, "block sizes as WxH")->delimiter(',');
  oracle->add_option("--seed", oracle_seed, "generator seed (default 1)");
  oracle->add_flag("--inject-fault", inject_fault)->group("");  // test-only

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sample)
      return run_sample(sample_input, sample_patch, method, clusters, fraction, seed,
                        fraction_opt->count() > 0, seed_opt->count() > 0, out_path,
                        emit_scores, threads == 0 ? 1 : threads, quiet);
    if (*heatmap)
      return run_heatmap(heatmap_input, heatmap_patch, heatmap_prefix, upscale,
                         heatmap_threads == 0 ? 1 : heatmap_threads);
    if (*stats) return run_stats(manifest_path);
    if (*oracle) return run_oracle_check(trials, size_specs, oracle_seed, inject_fault);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
