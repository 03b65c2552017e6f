#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dplab/cell.hpp"
#include "dplab/geometry.hpp"
#include "dplab/mesh.hpp"

namespace dplab {

using Json = nlohmann::ordered_json;

Json to_json(const InclusionSet& set);
InclusionSet inclusion_set_from_json(const Json& j);

/// 32-byte header: "DPLB", u32 version, u32 dim, u32 n, f64 period, u32 flags, u32 reserved;
/// then the cells packed LSB-first. Little-endian throughout.
std::vector<std::uint8_t> encode_bitmap(const IndicatorGrid& grid);
IndicatorGrid decode_bitmap(const std::vector<std::uint8_t>& bytes);
void write_bitmap(const std::filesystem::path& path, const IndicatorGrid& grid);
IndicatorGrid read_bitmap(const std::filesystem::path& path);

/// "DPGF" header (40 bytes) followed by row-major doubles and, for masked
/// fields, one byte per cell.
std::vector<std::uint8_t> encode_grid_function(const GridFunction& u);
GridFunction decode_grid_function(const std::vector<std::uint8_t>& bytes);
void write_grid_function(const std::filesystem::path& path, const GridFunction& u);
GridFunction read_grid_function(const std::filesystem::path& path);

/// x,y,value rows at cell centers.
std::string grid_function_csv(const GridFunction& u);

Json to_json(const HomogenizedData& hd);
Json to_json(const Matrix2& m);

/// Shortest round-trip text of a double.
std::string fmt(double x);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace dplab
