#pragma once

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace eps {

struct PgmImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// Binary PGM (P5), maxval 255.
inline void write_pgm(const std::filesystem::path& path, const PgmImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

namespace detail {

// PNM header token: skips whitespace and '#' comments.
inline std::string pnm_token(std::istream& in, const std::string& file) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF) throw std::runtime_error(file + ": truncated PGM header");
  std::string token;
  while (c != EOF && !std::isspace(c) && c != '#') {
    token += static_cast<char>(c);
    c = in.get();
  }
  if (c == '#') in.unget();
  return token;
}

inline int pnm_int(std::istream& in, const std::string& file) {
  const std::string token = pnm_token(in, file);
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw std::runtime_error(file + ": malformed PGM header token '" + token + "'");
  }
}

}  // namespace detail

inline PgmImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string name = path.string();
  if (detail::pnm_token(in, name) != "P5")
    throw std::runtime_error(name + ": not a binary PGM (P5) file");
  PgmImage image;
  image.width = detail::pnm_int(in, name);
  image.height = detail::pnm_int(in, name);
  const int maxval = detail::pnm_int(in, name);
  if (image.width < 1 || image.height < 1)
    throw std::runtime_error(name + ": invalid PGM dimensions");
  if (maxval < 1 || maxval > 255)
    throw std::runtime_error(name + ": unsupported PGM maxval " +
                             std::to_string(maxval) + " (8-bit only)");
  // Single whitespace byte separates the header from the raster.
  image.pixels.resize(static_cast<std::size_t>(image.width) * image.height);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size()))
    throw std::runtime_error(name + ": truncated PGM raster");
  return image;
}

}  // namespace eps
