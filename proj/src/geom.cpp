#include "ipcfuse/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ipcfuse/errors.hpp"

namespace ipcfuse::geom {

namespace {

double snap(double v) { return std::round(v / kSnapEps) * kSnapEps; }

// Shoelace on snapped coordinates so that areas agree exactly with the
// grid the clipper works on.
double signed_area_closed(const std::vector<Coord>& c) {
  double acc = 0.0;
  for (size_t i = 0; i + 1 < c.size(); ++i) {
    const double x0 = snap(c[i].lon), y0 = snap(c[i].lat);
    const double x1 = snap(c[i + 1].lon), y1 = snap(c[i + 1].lat);
    acc += x0 * y1 - x1 * y0;
  }
  return 0.5 * acc;
}

size_t distinct_vertices(const std::vector<Coord>& c) {
  // closed ring: last duplicates first
  size_t n = c.empty() ? 0 : c.size() - 1;
  std::vector<std::pair<double, double>> pts;
  pts.reserve(n);
  for (size_t i = 0; i < n; ++i) pts.emplace_back(snap(c[i].lon), snap(c[i].lat));
  std::sort(pts.begin(), pts.end());
  return std::unique(pts.begin(), pts.end()) - pts.begin();
}

void check_ring(const Ring& r) {
  if (r.coords.size() < 4) throw InvalidRing("ring must have at least 4 coordinates when closed");
  if (!(r.coords.front() == r.coords.back())) throw InvalidRing("ring is not closed");
  for (const Coord& c : r.coords) {
    if (!std::isfinite(c.lon) || !std::isfinite(c.lat)) throw InvalidRing("non-finite coordinate");
  }
  if (distinct_vertices(r.coords) < 3) throw InvalidRing("ring has fewer than 3 distinct vertices");
}

}  // namespace

double ring_area(const Ring& ring) {
  check_ring(ring);
  return signed_area_closed(ring.coords);
}

double polygon_area(const Polygon& p) {
  double outer = std::abs(ring_area(p.outer));
  double holes = 0.0;
  for (const Ring& h : p.holes) holes += std::abs(ring_area(h));
  if (holes > outer + 1e-9) throw InvalidPolygon("hole area exceeds outer ring area");
  return std::max(0.0, outer - holes);
}

double polygon_area(const MultiPolygon& m) {
  double acc = 0.0;
  for (const Polygon& p : m.parts) acc += polygon_area(p);
  return acc;
}

MultiPolygon filter_slivers(const MultiPolygon& m, double threshold) {
  MultiPolygon out;
  for (const Polygon& p : m.parts) {
    double area = 0.0;
    try {
      area = polygon_area(p);
    } catch (const Error&) {
      area = 0.0;  // degenerate part, below coordinate resolution
    }
    if (area >= threshold) out.parts.push_back(p);
  }
  return out;
}

void validate(const Polygon& p) {
  check_ring(p.outer);
  for (const Ring& h : p.holes) check_ring(h);
  polygon_area(p);  // rejects holes larger than the outer ring
}

void validate(const MultiPolygon& m) {
  for (const Polygon& p : m.parts) validate(p);
}

void normalize_orientation(Polygon& p) {
  if (ring_area(p.outer) < 0) std::reverse(p.outer.coords.begin(), p.outer.coords.end());
  for (Ring& h : p.holes) {
    if (ring_area(h) > 0) std::reverse(h.coords.begin(), h.coords.end());
  }
}

void normalize_orientation(MultiPolygon& m) {
  for (Polygon& p : m.parts) normalize_orientation(p);
}

Polygon make_rect(double lon0, double lat0, double lon1, double lat1) {
  Polygon p;
  p.outer.coords = {{lon0, lat0}, {lon1, lat0}, {lon1, lat1}, {lon0, lat1}, {lon0, lat0}};
  return p;
}

Box bounding_box(const MultiPolygon& m) {
  Box b;
  b.xmin = b.ymin = std::numeric_limits<double>::infinity();
  b.xmax = b.ymax = -std::numeric_limits<double>::infinity();
  for (const Polygon& p : m.parts) {
    for (const Coord& c : p.outer.coords) {
      b.xmin = std::min(b.xmin, c.lon);
      b.xmax = std::max(b.xmax, c.lon);
      b.ymin = std::min(b.ymin, c.lat);
      b.ymax = std::max(b.ymax, c.lat);
    }
  }
  return b;
}

bool boxes_overlap(const Box& a, const Box& b) {
  return a.xmin <= b.xmax && b.xmin <= a.xmax && a.ymin <= b.ymax && b.ymin <= a.ymax;
}

}  // namespace ipcfuse::geom
