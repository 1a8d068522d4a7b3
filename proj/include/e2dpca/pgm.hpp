#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "e2dpca/error.hpp"
#include "e2dpca/matrix.hpp"

namespace e2dpca {

class PgmError : public Error {
 public:
  enum class Kind { bad_magic, bad_header, maxval_too_large, truncated_raster };
  PgmError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Parses binary (P5) or ASCII (P2) PGM with maxval <= 255. '#' comments may
/// follow any header token. Pixel values are returned as reals in [0, maxval].
Matrix parse_pgm(std::span<const std::uint8_t> bytes);
Matrix parse_pgm(std::string_view text);
Matrix read_pgm(const std::filesystem::path& path);

/// Binary P5, maxval 255. Entries are rounded and clamped to [0, 255].
std::vector<std::uint8_t> encode_pgm(const Matrix& image);
void write_pgm(const Matrix& image, const std::filesystem::path& path);

}  // namespace e2dpca
