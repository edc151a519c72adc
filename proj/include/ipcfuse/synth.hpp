#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ipcfuse/acled.hpp"
#include "ipcfuse/fuse.hpp"
#include "ipcfuse/geom.hpp"
#include "ipcfuse/period.hpp"
#include "ipcfuse/shapefile.hpp"

namespace ipcfuse::synth {

/// Generator parameters. Randomness is split by purpose (geometry, conflicts,
/// phases) over counter-based streams, so the same seed always yields the
/// same world byte for byte.
struct SynthConfig {
  uint64_t seed = 1;
  int n_countries = 3;
  int regions_per_country = 3;
  int districts_per_region = 4;
  int n_years = 6;
  int start_year = 2016;
  double base_conflict_rate = 0.5;  // events per district-month, Poisson
  double burst_prob = 0.06;         // episode start probability, hot districts
  double burst_multiplier = 8.0;
  double coupling_beta = 0.0;       // conflict -> escalation strength
  double phase_persistence = 0.5;   // probability of holding instead of easing
  double hot_fraction = 0.35;       // share of districts that can burst
  int burst_length_months = 3;
  double escalation_base = -1.5;    // baseline escalation log-odds
  double region_base_spread = 0.0;  // +- range of per-region escalation offsets
  double jitter = 1e-5;             // phase-layer offset in degrees, sub-sliver
};

struct District {
  fuse::AdminUnit unit;  // normalized join key
  std::string raw_country, raw_admin1, raw_admin2;
  geom::Polygon rect;
  bool hot = false;       // may receive burst episodes
  double escalation_offset = 0.0;  // the district's region-level pressure
  int burst_months = 0;   // months spent inside bursts
  long total_events = 0;
};

struct World {
  SynthConfig config;
  std::vector<District> districts;
  std::vector<Period> periods;
  std::vector<ingest::ConflictEvent> events;
  /// Ground-truth phase per (district index, period).
  std::map<std::pair<size_t, Period>, int> phases;
  /// Event counts per (district index, calendar month).
  std::map<std::pair<size_t, YearMonth>, int> monthly_counts;
};

World generate(const SynthConfig& config);

/// In-memory layers for direct pipeline use.
ingest::GeoLayer admin_layer(const World& world);
ingest::GeoLayer fs_layer(const World& world, Period period);

struct EmittedPaths {
  std::filesystem::path admin_shp;
  std::vector<std::pair<Period, std::filesystem::path>> fs_shps;
  std::filesystem::path acled_csv;
  std::filesystem::path truth_json;
};

/// Writes the world in the external formats the pipeline ingests: admin
/// shapefile pair, one phase shapefile pair per period, the conflict CSV,
/// and a ground-truth JSON for test assertions.
EmittedPaths emit(const World& world, const std::filesystem::path& out_dir);

}  // namespace ipcfuse::synth
