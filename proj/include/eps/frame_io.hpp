#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "eps/frame.hpp"
#include "eps/pgm.hpp"

// Decoders keep only the luma plane; chroma is skipped. 8-bit input only.

namespace eps {

enum class InputFormat { y4m, yuv420p8, pgm_seq };

inline const char* format_name(InputFormat format) {
  switch (format) {
    case InputFormat::y4m: return "y4m";
    case InputFormat::yuv420p8: return "yuv420p8";
    case InputFormat::pgm_seq: return "pgm-seq";
  }
  return "?";
}

inline std::optional<InputFormat> parse_format_name(const std::string& name) {
  if (name == "y4m") return InputFormat::y4m;
  if (name == "yuv420p8") return InputFormat::yuv420p8;
  if (name == "pgm-seq") return InputFormat::pgm_seq;
  return std::nullopt;
}

/// From the path: directories hold PGM sequences, otherwise the extension
/// decides. nullopt when neither rule applies.
inline std::optional<InputFormat> infer_format(const std::filesystem::path& source) {
  std::error_code ec;
  if (std::filesystem::is_directory(source, ec)) return InputFormat::pgm_seq;
  const std::string ext = source.extension().string();
  if (ext == ".y4m" || ext == ".Y4M") return InputFormat::y4m;
  if (ext == ".yuv" || ext == ".YUV") return InputFormat::yuv420p8;
  return std::nullopt;
}

struct RawDims {
  int width = 0;
  int height = 0;
};

/// 1-based inclusive frame range.
struct FrameRange {
  int first = 1;
  int last = 1;
};

namespace detail {

inline void check_range(const std::optional<FrameRange>& range) {
  if (!range) return;
  if (range->first < 1 || range->last < range->first)
    throw std::invalid_argument("invalid frame range " + std::to_string(range->first) +
                                "-" + std::to_string(range->last));
}

[[noreturn]] inline void throw_truncated(const std::string& file, int frame_index) {
  throw std::runtime_error(file + ": truncated frame data at frame " +
                           std::to_string(frame_index));
}

// Reads count bytes into dst (or discards when dst is null). False on EOF
// at a frame boundary start, throws mid-frame.
inline bool read_plane(std::istream& in, std::uint8_t* dst, std::size_t count) {
  if (dst) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
    return in.gcount() == static_cast<std::streamsize>(count);
  }
  in.ignore(static_cast<std::streamsize>(count));
  return in.gcount() == static_cast<std::streamsize>(count);
}

inline FrameSequence load_y4m(const std::filesystem::path& source,
                              const std::optional<FrameRange>& range) {
  const std::string name = source.string();
  std::ifstream in(source, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + name);

  std::string header;
  if (!std::getline(in, header) || header.size() > 2048)
    throw std::runtime_error(name + ": malformed Y4M header");
  std::istringstream tokens(header);
  std::string magic;
  tokens >> magic;
  if (magic != "YUV4MPEG2")
    throw std::runtime_error(name + ": not a YUV4MPEG2 stream");

  const auto tag_int = [&name](const std::string& tag) {
    const std::string digits = tag.substr(1);
    if (digits.empty() ||
        digits.find_first_not_of("0123456789") != std::string::npos ||
        digits.size() > 6)
      throw std::runtime_error(name + ": malformed Y4M header tag '" + tag + "'");
    return std::stoi(digits);
  };

  int width = 0, height = 0;
  bool mono = false;
  std::string tag;
  while (tokens >> tag) {
    switch (tag[0]) {
      case 'W':
        width = tag_int(tag);
        break;
      case 'H':
        height = tag_int(tag);
        break;
      case 'C': {
        // 8-bit 4:2:0 variants and mono only.
        const std::string cs = tag.substr(1);
        if (cs == "mono") mono = true;
        else if (cs == "420" || cs == "420jpeg" || cs == "420paldv" || cs == "420mpeg2")
          mono = false;
        else
          throw std::runtime_error(name + ": unsupported Y4M colorspace C" + cs +
                                   " (8-bit 4:2:0 or mono required)");
        break;
      }
      default:
        break;  // F/I/A/X tags carry nothing we use
    }
  }
  if (width < 1 || height < 1)
    throw std::runtime_error(name + ": Y4M header missing W/H");

  const std::size_t luma_size = static_cast<std::size_t>(width) * height;
  const std::size_t chroma_size =
      mono ? 0
           : 2 * (static_cast<std::size_t>((width + 1) / 2) * ((height + 1) / 2));

  FrameSequence sequence;
  int index = 0;
  while (true) {
    std::string marker;
    if (!std::getline(in, marker)) break;  // clean end of stream
    ++index;
    if (marker != "FRAME" && marker.rfind("FRAME ", 0) != 0)
      throw std::runtime_error(name + ": malformed frame marker at frame " +
                               std::to_string(index));
    const bool wanted = !range || (index >= range->first && index <= range->last);
    LumaPlane plane;
    std::uint8_t* dst = nullptr;
    if (wanted) {
      plane.width = width;
      plane.height = height;
      plane.samples.resize(luma_size);
      dst = plane.samples.data();
    }
    if (!read_plane(in, dst, luma_size)) throw_truncated(name, index);
    if (chroma_size && !read_plane(in, nullptr, chroma_size)) throw_truncated(name, index);
    if (wanted) sequence.frames.push_back(std::move(plane));
    if (range && index >= range->last) break;
  }
  if (index == 0) throw_truncated(name, 1);
  if (range && index < range->last)
    throw std::runtime_error(name + ": frame range " + std::to_string(range->first) +
                             "-" + std::to_string(range->last) + " exceeds the " +
                             std::to_string(index) + " frames available");
  if (sequence.frames.empty())
    throw std::runtime_error(name + ": frame range selects no frames");
  return sequence;
}

inline FrameSequence load_raw_yuv(const std::filesystem::path& source,
                                  const std::optional<RawDims>& dims,
                                  const std::optional<FrameRange>& range) {
  const std::string name = source.string();
  if (!dims) throw std::invalid_argument("raw YUV input requires explicit dimensions");
  const int width = dims->width;
  const int height = dims->height;
  if (width < 1 || height < 1)
    throw std::invalid_argument("raw YUV dimensions must be positive");
  const std::size_t luma_size = static_cast<std::size_t>(width) * height;
  if (luma_size % 2 != 0)
    throw std::invalid_argument("raw YUV 4:2:0 requires an even luma sample count");
  const std::size_t frame_size = luma_size + luma_size / 2;

  std::error_code ec;
  const std::uintmax_t file_size = std::filesystem::file_size(source, ec);
  if (ec) throw std::runtime_error("cannot open " + name);
  if (file_size < frame_size)
    throw std::runtime_error(name + ": file smaller than one " + std::to_string(width) +
                             "x" + std::to_string(height) + " frame");
  if (file_size % frame_size != 0)
    throw std::runtime_error(name + ": size " + std::to_string(file_size) +
                             " is not a multiple of the " + std::to_string(frame_size) +
                             "-byte frame size");
  const int total_frames = static_cast<int>(file_size / frame_size);

  std::ifstream in(source, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + name);

  const int first = range ? range->first : 1;
  const int last = range ? range->last : total_frames;
  if (last > total_frames)
    throw std::runtime_error(name + ": frame range " + std::to_string(first) + "-" +
                             std::to_string(last) + " exceeds the " +
                             std::to_string(total_frames) + " frames available");

  FrameSequence sequence;
  for (int index = 1; index <= last; ++index) {
    const bool wanted = index >= first;
    LumaPlane plane;
    std::uint8_t* dst = nullptr;
    if (wanted) {
      plane.width = width;
      plane.height = height;
      plane.samples.resize(luma_size);
      dst = plane.samples.data();
    }
    if (!read_plane(in, dst, luma_size)) throw_truncated(name, index);
    if (!read_plane(in, nullptr, luma_size / 2)) throw_truncated(name, index);
    if (wanted) sequence.frames.push_back(std::move(plane));
  }
  return sequence;
}

inline FrameSequence load_pgm_sequence(const std::filesystem::path& source,
                                       const std::optional<FrameRange>& range) {
  const std::string name = source.string();
  std::error_code ec;
  if (!std::filesystem::is_directory(source, ec))
    throw std::runtime_error(name + ": pgm-seq input must be a directory");

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(source)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const std::filesystem::path& a, const std::filesystem::path& b) {
              return a.filename().string() < b.filename().string();
            });
  if (files.empty()) throw std::runtime_error(name + ": no .pgm files found");

  const int total_frames = static_cast<int>(files.size());
  const int first = range ? range->first : 1;
  const int last = range ? range->last : total_frames;
  if (last > total_frames)
    throw std::runtime_error(name + ": frame range " + std::to_string(first) + "-" +
                             std::to_string(last) + " exceeds the " +
                             std::to_string(total_frames) + " frames available");

  FrameSequence sequence;
  for (int index = first; index <= last; ++index) {
    const std::filesystem::path& file = files[static_cast<std::size_t>(index) - 1];
    PgmImage image = read_pgm(file);
    if (!sequence.frames.empty() && (image.width != sequence.width() ||
                                     image.height != sequence.height()))
      throw std::runtime_error(file.string() + ": frame dimensions " +
                               std::to_string(image.width) + "x" +
                               std::to_string(image.height) + " differ from " +
                               std::to_string(sequence.width()) + "x" +
                               std::to_string(sequence.height()));
    LumaPlane plane;
    plane.width = image.width;
    plane.height = image.height;
    plane.samples = std::move(image.pixels);
    sequence.frames.push_back(std::move(plane));
  }
  return sequence;
}

}  // namespace detail

/// Decodes `source` into luma planes, in display order. For yuv420p8 the
/// dimensions are required. `range` keeps only the given 1-based inclusive
/// sub-range without buffering the rest.
inline FrameSequence load_sequence(const std::filesystem::path& source,
                                   InputFormat format,
                                   std::optional<RawDims> raw_dims = std::nullopt,
                                   std::optional<FrameRange> range = std::nullopt) {
  detail::check_range(range);
  switch (format) {
    case InputFormat::y4m: return detail::load_y4m(source, range);
    case InputFormat::yuv420p8: return detail::load_raw_yuv(source, raw_dims, range);
    case InputFormat::pgm_seq: return detail::load_pgm_sequence(source, range);
  }
  throw std::invalid_argument("unknown input format");
}

}  // namespace eps
