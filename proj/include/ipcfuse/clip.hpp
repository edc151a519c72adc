#pragma once

#include "ipcfuse/geom.hpp"

namespace ipcfuse::geom {

/// Boolean intersection: the region covered by both inputs.
///
/// Plane-sweep clipping over a 1e-9 degree integer grid with exact wide-integer
/// predicates; handles concave, multi-part and holed inputs. Intersection
/// points are snapped to the grid. Degenerate results (shared edges or points,
/// zero-area pieces) are dropped. Throws InvalidPolygon on invalid input.
MultiPolygon intersect(const MultiPolygon& a, const MultiPolygon& b);

}  // namespace ipcfuse::geom
