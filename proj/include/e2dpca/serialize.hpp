#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "e2dpca/model.hpp"

namespace e2dpca {

// Binary model container, little-endian:
//
//   char[8]  magic "E2DPCAMD"
//   u32      format version (1)
//   u8       method, direction, metric, reserved
//   u64      r, d, original rows, original cols
//   u64      basis rows, basis cols
//   f64[d]                  eigenvalues
//   f64[rows * cols]        basis vectors, row-major
//   u64, u64, f64[...]      mean image (rows, cols, row-major data)
//
// Doubles are written as their IEEE-754 bit patterns, so a load reproduces
// the saved basis exactly.

std::vector<std::uint8_t> serialize(const ProjectionBasis& basis);
ProjectionBasis deserialize(std::span<const std::uint8_t> bytes);

void save_model(const ProjectionBasis& basis, const std::filesystem::path& path);
ProjectionBasis load_model(const std::filesystem::path& path);

}  // namespace e2dpca
