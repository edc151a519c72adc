#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ipcfuse/geom.hpp"

namespace ipcfuse::ingest {

using AttrValue = std::variant<std::string, int64_t, double>;

std::string attr_to_string(const AttrValue& v);

struct Feature {
  geom::MultiPolygon geometry;
  /// Ordered (field name, value) pairs as decoded from the attribute table.
  std::vector<std::pair<std::string, AttrValue>> attributes;

  /// Case-insensitive field lookup; nullptr when absent.
  const AttrValue* attr(std::string_view name) const;
};

/// A set of multipolygon features carried together, WGS84 degrees.
struct GeoLayer {
  std::vector<Feature> features;
};

struct ShapefileOptions {
  bool dbf_utf8 = false;  // attribute text is Latin-1 unless set
};

/// Reads an ESRI shapefile pair: .shp geometry (shape types 0, 5, 15; Z/M
/// discarded) plus the dBase III attribute table, one Feature per record in
/// record order. Ring orientation is normalized to outer-CCW / holes-CW.
///
/// Throws NotAShapefile (bad magic/version), UnsupportedShapeType,
/// CorruptPair (record/attribute count mismatch), TruncatedFile.
GeoLayer parse_shapefile(std::span<const uint8_t> shp_bytes, std::span<const uint8_t> dbf_bytes,
                         const ShapefileOptions& options = {});

/// Convenience loader taking a path to the .shp file; the .dbf is expected
/// alongside with the same stem.
GeoLayer load_shapefile(const std::filesystem::path& shp_path,
                        const ShapefileOptions& options = {});

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);

}  // namespace ipcfuse::ingest
