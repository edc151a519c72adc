#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ipcfuse/clip.hpp"
#include "ipcfuse/fuse.hpp"
#include "ipcfuse/stats.hpp"
#include "ipcfuse/synth.hpp"

using namespace ipcfuse;
using namespace ipcfuse::synth;

namespace {

std::vector<uint8_t> slurp(const std::filesystem::path& p) {
  return ingest::read_file_bytes(p);
}

SynthConfig tiny_config(uint64_t seed = 1) {
  SynthConfig c;
  c.seed = seed;
  c.n_countries = 1;
  c.regions_per_country = 1;
  c.districts_per_region = 4;
  c.n_years = 3;
  return c;
}

}  // namespace

TEST_CASE("generate: grid tiles the country block without overlap") {
  World world = generate(tiny_config());
  REQUIRE(world.districts.size() == 4);
  double total = 0.0;
  for (const auto& d : world.districts) {
    const double a = geom::polygon_area(d.rect);
    CHECK(a >= 0.01);  // well above the sliver threshold
    total += a;
  }
  // exact tiling: the union footprint equals the area sum
  geom::MultiPolygon all;
  for (const auto& d : world.districts) all.parts.push_back(d.rect);
  CHECK(geom::polygon_area(all) == doctest::Approx(total).epsilon(1e-12));
  // pairwise disjoint interiors
  for (size_t i = 0; i < world.districts.size(); ++i) {
    for (size_t j = i + 1; j < world.districts.size(); ++j) {
      geom::MultiPolygon a, b;
      a.parts.push_back(world.districts[i].rect);
      b.parts.push_back(world.districts[j].rect);
      CHECK(geom::polygon_area(geom::intersect(a, b)) == 0.0);
    }
  }
}

TEST_CASE("generate: zero conflict rate produces no events") {
  SynthConfig c = tiny_config();
  c.base_conflict_rate = 0.0;
  c.burst_prob = 0.0;
  World world = generate(c);
  CHECK(world.events.empty());
}

TEST_CASE("generate: Poisson mean close to the configured rate") {
  SynthConfig c = tiny_config(9);
  c.n_countries = 2;
  c.regions_per_country = 3;
  c.districts_per_region = 4;  // 24 districts
  c.n_years = 2;
  c.base_conflict_rate = 2.0;
  c.hot_fraction = 0.0;  // pure Poisson, no bursts
  World world = generate(c);
  // district-months: 24 districts x (24 lead-in + months through 202510)
  size_t months = 0;
  YearMonth m{c.start_year - 2, 2};
  const YearMonth last = world.periods.back().ym();
  while (m <= last) {
    ++months;
    m = m.next();
  }
  const double cells = static_cast<double>(world.districts.size() * months);
  REQUIRE(cells >= 1000);
  const double mean = static_cast<double>(world.events.size()) / cells;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.075));  // 2.0 +- 0.15
}

TEST_CASE("generate: phases stay within the five-phase range") {
  SynthConfig c = tiny_config(3);
  c.coupling_beta = 2.0;
  World world = generate(c);
  for (const auto& [key, phase] : world.phases) {
    CHECK(phase >= 1);
    CHECK(phase <= 5);
  }
}

TEST_CASE("generate: identical seeds give identical worlds and files") {
  const SynthConfig c = tiny_config(42);
  World w1 = generate(c);
  World w2 = generate(c);
  CHECK(w1.events.size() == w2.events.size());
  CHECK(w1.phases == w2.phases);

  const auto dir1 = std::filesystem::temp_directory_path() / "ipcfuse_synth_a";
  const auto dir2 = std::filesystem::temp_directory_path() / "ipcfuse_synth_b";
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
  EmittedPaths p1 = emit(w1, dir1);
  EmittedPaths p2 = emit(w2, dir2);
  CHECK(slurp(p1.admin_shp) == slurp(p2.admin_shp));
  CHECK(slurp(p1.acled_csv) == slurp(p2.acled_csv));
  CHECK(slurp(p1.truth_json) == slurp(p2.truth_json));
  REQUIRE(p1.fs_shps.size() == p2.fs_shps.size());
  for (size_t i = 0; i < p1.fs_shps.size(); ++i) {
    CHECK(slurp(p1.fs_shps[i].second) == slurp(p2.fs_shps[i].second));
  }
  std::filesystem::remove_all(dir1);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("emitted files parse cleanly and overlay recovers the true phases") {
  SynthConfig c = tiny_config(7);
  c.base_conflict_rate = 0.8;
  World world = generate(c);
  const auto dir = std::filesystem::temp_directory_path() / "ipcfuse_synth_rt";
  std::filesystem::remove_all(dir);
  EmittedPaths paths = emit(world, dir);

  ingest::GeoLayer admin = ingest::load_shapefile(paths.admin_shp);
  CHECK(admin.features.size() == world.districts.size());

  std::ifstream csv(paths.acled_csv, std::ios::binary);
  ingest::AcledReport report;
  auto events = ingest::parse_acled(csv, /*strict=*/true, &report);
  CHECK(events.size() == world.events.size());
  CHECK(report.rows_skipped == 0);

  for (const auto& [period, shp_path] : paths.fs_shps) {
    ingest::GeoLayer fs = ingest::load_shapefile(shp_path);
    auto records = fuse::dedup_worst(fuse::overlay(fs, admin, period));
    REQUIRE(records.size() == world.districts.size());
    for (const auto& rec : records) {
      // find the district and compare with ground truth
      size_t di = world.districts.size();
      for (size_t i = 0; i < world.districts.size(); ++i) {
        if (world.districts[i].unit == rec.unit) {
          di = i;
          break;
        }
      }
      REQUIRE(di < world.districts.size());
      CHECK(rec.phase == world.phases.at({di, period}));
      CHECK(rec.area == doctest::Approx(0.25).epsilon(1e-3));
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("sliver loss from the jitter stays within the area-conservation bound") {
  SynthConfig c = tiny_config(5);
  c.n_countries = 2;
  World world = generate(c);
  const Period period = world.periods[2];
  ingest::GeoLayer fs = fs_layer(world, period);
  ingest::GeoLayer admin = admin_layer(world);
  fuse::OverlayStats stats;
  fuse::overlay(fs, admin, period, {}, Exec::Parallel, &stats);
  REQUIRE(stats.area_unfiltered > 0.0);
  CHECK(stats.area_kept >= (1.0 - 1e-4) * stats.area_unfiltered);
}

TEST_CASE("null coupling leaves district correlations centered on zero") {
  SynthConfig c;
  c.seed = 11;
  c.coupling_beta = 0.0;
  c.n_years = 6;
  World world = generate(c);
  auto fs = [&](Period p) { return fs_layer(world, p); };
  std::vector<fuse::FSRecord> all;
  const auto admin = admin_layer(world);
  for (const Period& p : world.periods) {
    auto recs = fuse::dedup_worst(fuse::overlay(fs(p), admin, p));
    all.insert(all.end(), recs.begin(), recs.end());
  }
  auto fused = fuse::lag_join(all, fuse::aggregate_conflicts(world.events));
  stats::CorrelateOptions opts;
  opts.include_all = true;
  auto results = stats::correlate(fused, stats::Level::District, opts);
  REQUIRE(results.size() >= 20);
  double mean_rho = 0.0;
  for (const auto& r : results) mean_rho += r.rho;
  mean_rho /= static_cast<double>(results.size());
  CHECK(std::fabs(mean_rho) <= 0.12);  // single seed, loose bound
}
