#pragma once

#include <cstdint>
#include <vector>

namespace ipcfuse::geom {

// All geometry lives in planar WGS84 degree space. Areas are plain shoelace
// areas in square degrees, no projection: the sliver threshold used by the
// pipeline (0.005) is a degree-squared quantity. Coordinates are compared on
// a 1e-9 degree grid; everything below that is treated as noise.
inline constexpr double kSnapEps = 1e-9;

struct Coord {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const Coord& a, const Coord& b) = default;
};

/// Closed vertex loop (first == last). Canonical form after normalize():
/// outer rings counter-clockwise, holes clockwise.
struct Ring {
  std::vector<Coord> coords;
};

struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

struct MultiPolygon {
  std::vector<Polygon> parts;

  bool empty() const { return parts.empty(); }
};

/// Signed shoelace area of a closed ring, square degrees. Positive for
/// counter-clockwise orientation. Throws InvalidRing for open rings or
/// rings with fewer than 3 distinct vertices.
double ring_area(const Ring& ring);

/// Non-negative area: |outer| - sum(|holes|), per part. Throws
/// InvalidPolygon when the holes of a part exceed its outer ring.
double polygon_area(const Polygon& p);
double polygon_area(const MultiPolygon& m);

/// Keeps exactly the parts whose area is >= threshold.
MultiPolygon filter_slivers(const MultiPolygon& m, double threshold);

/// Checks ring closure and vertex counts; throws InvalidRing / InvalidPolygon.
void validate(const Polygon& p);
void validate(const MultiPolygon& m);

/// Reorients rings in place to the canonical form (outer CCW, holes CW).
void normalize_orientation(Polygon& p);
void normalize_orientation(MultiPolygon& m);

/// Axis-aligned rectangle helper, counter-clockwise outer ring.
Polygon make_rect(double lon0, double lat0, double lon1, double lat1);

struct Box {
  double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
};
Box bounding_box(const MultiPolygon& m);
bool boxes_overlap(const Box& a, const Box& b);

}  // namespace ipcfuse::geom
