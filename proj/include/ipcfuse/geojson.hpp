#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>

#include "ipcfuse/geom.hpp"
#include "ipcfuse/stats.hpp"

namespace ipcfuse::geojson {

/// FeatureCollection with one feature per correlation result; the unit's
/// geometry carries rho/p/n properties for choropleth rendering by external
/// tools. Units without a geometry entry are emitted with null geometry.
void write_correlations(std::ostream& out, std::span<const stats::CorrelationResult> results,
                        const std::map<std::string, geom::MultiPolygon>& unit_geometry);

}  // namespace ipcfuse::geojson
