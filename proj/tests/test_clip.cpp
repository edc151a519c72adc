#include <doctest.h>

#include <cmath>

#include "ipcfuse/clip.hpp"
#include "ipcfuse/errors.hpp"
#include "ipcfuse/geom.hpp"
#include "ipcfuse/rng.hpp"
#include "support/geometry_oracles.hpp"

using namespace ipcfuse;
using namespace ipcfuse::geom;

namespace {

MultiPolygon mp(Polygon p) {
  MultiPolygon m;
  m.parts.push_back(std::move(p));
  return m;
}

}  // namespace

TEST_CASE("intersect: disjoint squares give empty result") {
  MultiPolygon a = mp(make_rect(0, 0, 1, 1));
  MultiPolygon b = mp(make_rect(5, 5, 6, 6));
  CHECK(intersect(a, b).empty());
}

TEST_CASE("intersect: self intersection preserves area") {
  MultiPolygon a = mp(make_rect(0.25, -1.5, 3.75, 2.5));
  MultiPolygon r = intersect(a, a);
  CHECK(std::abs(polygon_area(r) - polygon_area(a)) <= 1e-9 * polygon_area(a));
}

TEST_CASE("intersect: half-shifted unit squares overlap by a quarter") {
  MultiPolygon a = mp(make_rect(0, 0, 1, 1));
  MultiPolygon b = mp(make_rect(0.5, 0.5, 1.5, 1.5));
  MultiPolygon r = intersect(a, b);
  CHECK(polygon_area(r) == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("intersect: edge-touching squares produce no degenerate output") {
  MultiPolygon a = mp(make_rect(0, 0, 1, 1));
  MultiPolygon b = mp(make_rect(1, 0, 2, 1));  // shares the x=1 edge only
  CHECK(intersect(a, b).empty());
  MultiPolygon c = mp(make_rect(1, 1, 2, 2));  // shares one corner point
  CHECK(intersect(a, c).empty());
}

TEST_CASE("intersect: holes are respected") {
  Polygon donut = make_rect(0, 0, 4, 4);
  donut.holes.push_back(make_rect(1, 1, 3, 3).outer);
  MultiPolygon a = mp(donut);
  MultiPolygon b = mp(make_rect(0, 0, 4, 2));  // lower half
  MultiPolygon r = intersect(a, b);
  // lower half of the donut: 4x2 minus the 2x1 hole strip
  CHECK(polygon_area(r) == doctest::Approx(6.0).epsilon(1e-9));

  // clip entirely inside the hole
  MultiPolygon inner = mp(make_rect(1.5, 1.5, 2.5, 2.5));
  CHECK(intersect(a, inner).empty());
}

TEST_CASE("intersect: result carved with a hole") {
  Polygon donut = make_rect(0, 0, 4, 4);
  donut.holes.push_back(make_rect(1, 1, 3, 3).outer);
  MultiPolygon a = mp(donut);
  MultiPolygon b = mp(make_rect(0, 0, 4, 4));
  MultiPolygon r = intersect(a, b);
  CHECK(polygon_area(r) == doctest::Approx(12.0).epsilon(1e-9));
  // the hole must survive as a hole, not by part splitting
  size_t holes = 0;
  for (const auto& part : r.parts) holes += part.holes.size();
  CHECK(holes == 1);
}

TEST_CASE("intersect: multipart inputs with shared internal edges dissolve") {
  // two tiles sharing a full edge, as one multipart feature
  MultiPolygon tiles;
  tiles.parts.push_back(make_rect(0, 0, 1, 1));
  tiles.parts.push_back(make_rect(1, 0, 2, 1));
  MultiPolygon clip = mp(make_rect(0.25, 0.25, 1.75, 0.75));
  MultiPolygon r = intersect(tiles, clip);
  CHECK(polygon_area(r) == doctest::Approx(0.75).epsilon(1e-9));
  // interiors merge across the shared wall
  CHECK(r.parts.size() == 1);
}

TEST_CASE("intersect: concave subject") {
  // U-shaped subject
  Polygon u;
  u.outer.coords = {{0, 0}, {3, 0}, {3, 3}, {2, 3}, {2, 1}, {1, 1}, {1, 3}, {0, 3}, {0, 0}};
  MultiPolygon a = mp(u);
  MultiPolygon b = mp(make_rect(0, 2, 3, 4));  // horizontal band across the arms
  MultiPolygon r = intersect(a, b);
  CHECK(polygon_area(r) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.parts.size() == 2);
}

TEST_CASE("intersect: invalid input is rejected") {
  MultiPolygon bad;
  Polygon p;
  p.outer.coords = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};  // open ring
  bad.parts.push_back(p);
  MultiPolygon ok = mp(make_rect(0, 0, 1, 1));
  CHECK_THROWS_AS(intersect(bad, ok), InvalidPolygon);
  CHECK_THROWS_AS(intersect(ok, bad), InvalidPolygon);
}

TEST_CASE("intersect: convex pairs match the half-plane clipping oracle") {
  CounterRng rng(2024, 7);
  for (int trial = 0; trial < 200; ++trial) {
    auto ha = testsupport::random_convex(rng, 0.0, 0.0, 2.0, 8 + (int)rng.uniform_int(8));
    auto hb = testsupport::random_convex(rng, rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), 2.0,
                                         8 + (int)rng.uniform_int(8));
    REQUIRE(ha.size() >= 3);
    REQUIRE(hb.size() >= 3);
    const double oracle = testsupport::convex_intersection_area(ha, hb);
    REQUIRE(oracle > 0.5);  // the generator guarantees fat overlaps
    MultiPolygon a = mp(testsupport::polygon_from_open_ring(ha));
    MultiPolygon b = mp(testsupport::polygon_from_open_ring(hb));
    const double got = polygon_area(intersect(a, b));
    CHECK(std::abs(got - oracle) <= 1e-7 * oracle);
  }
}

TEST_CASE("intersect: area monotonicity and symmetry on random multipolygons") {
  CounterRng rng(99, 13);
  for (int trial = 0; trial < 400; ++trial) {
    MultiPolygon a = testsupport::random_multipolygon(rng);
    MultiPolygon b = testsupport::random_multipolygon(rng);
    const double ab = polygon_area(intersect(a, b));
    const double ba = polygon_area(intersect(b, a));
    CHECK(std::abs(ab - ba) <= 1e-9);
    CHECK(ab <= std::min(polygon_area(a), polygon_area(b)) + 1e-9);
  }
}

TEST_CASE("intersect: output parts are valid polygons") {
  CounterRng rng(5150, 3);
  for (int trial = 0; trial < 50; ++trial) {
    MultiPolygon a = testsupport::random_multipolygon(rng);
    MultiPolygon b = testsupport::random_multipolygon(rng);
    MultiPolygon r = intersect(a, b);
    CHECK_NOTHROW(validate(r));
    for (const auto& part : r.parts) {
      CHECK(ring_area(part.outer) > 0);
      for (const auto& h : part.holes) CHECK(ring_area(h) < 0);
    }
  }
}
