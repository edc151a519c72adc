#include <algorithm>
#include <cmath>
#include <cstdio>

#include "acceptance_criteria.hpp"
#include "ipcfuse/clip.hpp"
#include "ipcfuse/geom.hpp"
#include "ipcfuse/rng.hpp"
#include "support/geometry_oracles.hpp"

namespace acceptance {

using namespace ipcfuse;
using namespace ipcfuse::geom;

// Criterion 1: 1,000 randomized convex pairs against the half-plane clipping
// oracle at 1e-7 relative; monotonicity + symmetry on 10,000 random
// multipolygon pairs at 1e-9.
bool geometry_suite(std::string& detail) {
  CounterRng rng(42, 1);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto ha = testsupport::random_convex(rng, 0.0, 0.0, 2.0, 8 + (int)rng.uniform_int(8));
    auto hb = testsupport::random_convex(rng, rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6), 2.0,
                                         8 + (int)rng.uniform_int(8));
    if (ha.size() < 3 || hb.size() < 3) return false;
    const double oracle = testsupport::convex_intersection_area(ha, hb);
    if (oracle <= 0.5) {
      detail = "generator produced a thin overlap; fixture assumption broken";
      return false;
    }
    MultiPolygon a, b;
    a.parts.push_back(testsupport::polygon_from_open_ring(ha));
    b.parts.push_back(testsupport::polygon_from_open_ring(hb));
    const double got = polygon_area(intersect(a, b));
    worst_rel = std::max(worst_rel, std::abs(got - oracle) / oracle);
    if (std::abs(got - oracle) > 1e-7 * oracle) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "convex pair %d: |%.12g - %.12g| > 1e-7 rel", trial, got,
                    oracle);
      detail = buf;
      return false;
    }
  }

  CounterRng rng2(42, 2);
  for (int trial = 0; trial < 10000; ++trial) {
    MultiPolygon a = testsupport::random_multipolygon(rng2);
    MultiPolygon b = testsupport::random_multipolygon(rng2);
    const double ab = polygon_area(intersect(a, b));
    const double ba = polygon_area(intersect(b, a));
    if (std::abs(ab - ba) > 1e-9) {
      detail = "symmetry violated at trial " + std::to_string(trial);
      return false;
    }
    if (ab > std::min(polygon_area(a), polygon_area(b)) + 1e-9) {
      detail = "monotonicity violated at trial " + std::to_string(trial);
      return false;
    }
  }

  char buf[96];
  std::snprintf(buf, sizeof buf, "worst convex-oracle rel err %.2e over 1000 pairs", worst_rel);
  detail = buf;
  return true;
}

}  // namespace acceptance
