#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "plc/field.hpp"

namespace plc {

/// Raw contents of a PLSF field file.
///
/// Layout, little-endian throughout:
///   "PLSF" | u8 version (1) | u8 dimension | u8 role tag
///   | u64 node count per axis | f64 origin per axis | f64 h
///   | inside mask, one bit per node, LSB-first, row-major, padded to a byte
///   | f64 value per interior node, row-major
/// Row-major means x varies fastest.
struct PlsfFile {
  std::uint8_t version = 1;
  std::uint8_t dimension = 1;
  FieldRole role = FieldRole::u;
  std::vector<std::uint64_t> dims;
  std::vector<double> origin;
  double h = 0.0;
  std::vector<std::uint8_t> inside;  // one flag per node
  std::vector<double> values;
};

std::vector<std::uint8_t> encode_plsf(const GridField& field);
PlsfFile decode_plsf(const std::vector<std::uint8_t>& bytes);

void write_plsf(const std::filesystem::path& path, const GridField& field);
PlsfFile read_plsf(const std::filesystem::path& path);

/// Reads a field and binds it to `domain`. The domain is re-rasterized at the
/// stored spacing; a mismatch in grid or mask is an IoError.
GridField load_field(const std::filesystem::path& path, const ConvexDomain& domain);
GridField bind_field(const PlsfFile& file, const ConvexDomain& domain);

}  // namespace plc
