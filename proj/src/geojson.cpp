#include "ipcfuse/geojson.hpp"

#include <ostream>

#include <json.hpp>

namespace ipcfuse::geojson {

namespace {

nlohmann::json ring_coords(const geom::Ring& ring) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : ring.coords) arr.push_back({c.lon, c.lat});
  return arr;
}

nlohmann::json multipolygon_coords(const geom::MultiPolygon& m) {
  nlohmann::json parts = nlohmann::json::array();
  for (const auto& p : m.parts) {
    nlohmann::json rings = nlohmann::json::array();
    rings.push_back(ring_coords(p.outer));
    for (const auto& h : p.holes) rings.push_back(ring_coords(h));
    parts.push_back(std::move(rings));
  }
  return parts;
}

}  // namespace

void write_correlations(std::ostream& out, std::span<const stats::CorrelationResult> results,
                        const std::map<std::string, geom::MultiPolygon>& unit_geometry) {
  nlohmann::json fc;
  fc["type"] = "FeatureCollection";
  fc["features"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json f;
    f["type"] = "Feature";
    f["properties"] = {{"unit_key", r.unit_key},
                       {"level", std::string(stats::to_string(r.level))},
                       {"rho", r.rho},
                       {"p_value", r.p_value},
                       {"n", r.n},
                       {"low_confidence", r.low_confidence}};
    auto it = unit_geometry.find(r.unit_key);
    if (it == unit_geometry.end() || it->second.empty()) {
      f["geometry"] = nullptr;
    } else {
      f["geometry"] = {{"type", "MultiPolygon"}, {"coordinates", multipolygon_coords(it->second)}};
    }
    fc["features"].push_back(std::move(f));
  }
  out << fc.dump(1) << "\n";
}

}  // namespace ipcfuse::geojson
