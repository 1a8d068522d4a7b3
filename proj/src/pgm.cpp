#include "e2dpca/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace e2dpca {
namespace {

class HeaderScanner {
 public:
  explicit HeaderScanner(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Skips whitespace and comment lines, then reads an unsigned decimal token.
  std::size_t number(const char* what) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) {
      throw PgmError(PgmError::Kind::bad_header, std::string("PGM header ends before ") + what);
    }
    if (!std::isdigit(bytes_[pos_])) {
      throw PgmError(PgmError::Kind::bad_header,
                     std::string("PGM header: non-numeric ") + what + " at byte " + std::to_string(pos_));
    }
    std::size_t value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
      if (value > (std::size_t{1} << 32)) throw PgmError(PgmError::Kind::bad_header, std::string("PGM ") + what + " too large");
      ++pos_;
    }
    if (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#') {
      throw PgmError(PgmError::Kind::bad_header,
                     std::string("PGM header: malformed ") + what + " at byte " + std::to_string(pos_));
    }
    return value;
  }

  // The single whitespace byte that separates maxval from a binary raster.
  // A comment directly after maxval runs to the end of its line; that newline
  // is then the separator.
  void raster_separator() {
    while (pos_ < bytes_.size() && bytes_[pos_] == '#') {
      while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      if (pos_ < bytes_.size()) ++pos_;
      if (pos_ < bytes_.size() && bytes_[pos_] != '#') return;
    }
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw PgmError(PgmError::Kind::bad_header, "PGM header: missing whitespace before raster");
    }
    ++pos_;
  }

  std::size_t position() const { return pos_; }
  void set_position(std::size_t pos) { pos_ = pos; }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_end() const { return pos_ >= bytes_.size(); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Matrix parse_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw PgmError(PgmError::Kind::bad_magic, "not a PGM file (expected P5 or P2 magic)");
  }
  const bool binary = bytes[1] == '5';
  HeaderScanner scan(bytes);
  scan.set_position(2);
  if (!scan.at_end() && !std::isspace(bytes[2]) && bytes[2] != '#') {
    throw PgmError(PgmError::Kind::bad_magic, "not a PGM file (magic not followed by whitespace)");
  }
  const std::size_t width = scan.number("width");
  const std::size_t height = scan.number("height");
  const std::size_t maxval = scan.number("maxval");
  if (width == 0 || height == 0) throw PgmError(PgmError::Kind::bad_header, "PGM dimensions must be positive");
  if (maxval == 0) throw PgmError(PgmError::Kind::bad_header, "PGM maxval must be positive");
  if (maxval > 255) {
    throw PgmError(PgmError::Kind::maxval_too_large, "PGM maxval " + std::to_string(maxval) + " exceeds 255");
  }

  const std::size_t count = width * height;
  std::vector<double> pixels(count);
  if (binary) {
    scan.raster_separator();
    const std::size_t start = scan.position();
    if (bytes.size() - start < count) {
      throw PgmError(PgmError::Kind::truncated_raster, "PGM raster truncated: expected " + std::to_string(count) +
                                                           " bytes, found " + std::to_string(bytes.size() - start));
    }
    for (std::size_t i = 0; i < count; ++i) pixels[i] = static_cast<double>(bytes[start + i]);
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      scan.skip_space_and_comments();
      if (scan.at_end()) {
        throw PgmError(PgmError::Kind::truncated_raster, "PGM raster truncated: expected " + std::to_string(count) +
                                                             " values, found " + std::to_string(i));
      }
      const std::size_t v = scan.number("pixel");
      if (v > maxval) throw PgmError(PgmError::Kind::bad_header, "PGM pixel value exceeds maxval");
      pixels[i] = static_cast<double>(v);
    }
  }
  return Matrix(height, width, std::move(pixels));
}

Matrix parse_pgm(std::string_view text) {
  return parse_pgm(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Matrix read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_pgm(bytes);
  } catch (const PgmError& e) {
    throw PgmError(e.kind(), path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm(const Matrix& image) {
  const std::string header =
      "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.size());
  for (double v : image.data()) out.push_back(static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)));
  return out;
}

void write_pgm(const Matrix& image, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace e2dpca
