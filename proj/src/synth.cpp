#include "ipcfuse/synth.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "ipcfuse/errors.hpp"
#include "ipcfuse/names.hpp"
#include "ipcfuse/rng.hpp"

namespace ipcfuse::synth {

namespace {

constexpr uint64_t kStreamGeometry = 1;
constexpr uint64_t kStreamConflicts = 2;
constexpr uint64_t kStreamPhases = 3;
constexpr uint64_t kStreamJitter = 4;

constexpr double kDistrictSize = 0.5;
constexpr double kCountryGap = 1.0;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// event-type mix and fatality tail per type (geometric success probability)
constexpr double kTypeCdf[6] = {0.25, 0.35, 0.55, 0.70, 0.80, 1.00};
constexpr double kFatalityP[6] = {0.40, 0.50, 0.90, 0.70, 0.85, 0.45};

std::string fmt2(const char* prefix, int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%02d", prefix, v);
  return buf;
}
std::string fmt3(const char* prefix, int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%s%03d", prefix, v);
  return buf;
}

}  // namespace

World generate(const SynthConfig& config) {
  World world;
  world.config = config;

  // districts on a uniform grid, country blocks side by side
  CounterRng geom_rng(config.seed, kStreamGeometry);
  const double country_width = config.districts_per_region * kDistrictSize + kCountryGap;
  for (int c = 0; c < config.n_countries; ++c) {
    for (int r = 0; r < config.regions_per_country; ++r) {
      // regions differ in their standing escalation pressure
      const double region_offset = config.region_base_spread * (2.0 * geom_rng.uniform() - 1.0);
      for (int d = 0; d < config.districts_per_region; ++d) {
        District dist;
        dist.raw_country = fmt2("C", c + 1);
        dist.raw_admin1 = fmt2("R", r + 1);
        dist.raw_admin2 = fmt3("D", r * config.districts_per_region + d + 1);
        dist.unit = {normalize_name(dist.raw_country), normalize_name(dist.raw_admin1),
                     normalize_name(dist.raw_admin2)};
        const double x0 = c * country_width + d * kDistrictSize;
        const double y0 = r * kDistrictSize;
        dist.rect = geom::make_rect(x0, y0, x0 + kDistrictSize, y0 + kDistrictSize);
        dist.hot = geom_rng.uniform() < config.hot_fraction;
        dist.escalation_offset = region_offset;
        world.districts.push_back(std::move(dist));
      }
    }
  }

  for (int y = 0; y < config.n_years; ++y) {
    for (int m : {2, 6, 10}) world.periods.push_back({config.start_year + y, m});
  }

  // conflict events, starting two years before the first period so that the
  // cumulative window is fully covered
  CounterRng conflict_rng(config.seed, kStreamConflicts);
  YearMonth first_month{config.start_year - 2, 2};
  const YearMonth last_month = world.periods.back().ym();
  for (size_t di = 0; di < world.districts.size(); ++di) {
    District& dist = world.districts[di];
    int burst_left = 0;
    for (YearMonth m = first_month; m <= last_month; m = m.next()) {
      if (burst_left == 0 && dist.hot && conflict_rng.uniform() < config.burst_prob) {
        burst_left = config.burst_length_months;
      }
      const bool in_burst = burst_left > 0;
      if (in_burst) --burst_left;
      const double rate =
          config.base_conflict_rate * (in_burst ? config.burst_multiplier : 1.0);
      const int count = conflict_rng.poisson(rate);
      if (in_burst) dist.burst_months += 1;
      if (count > 0) world.monthly_counts[{di, m}] = count;
      for (int e = 0; e < count; ++e) {
        ingest::ConflictEvent ev;
        ev.event_date = {m.year, m.month, 1 + (int)conflict_rng.uniform_int(28)};
        const double u = conflict_rng.uniform();
        size_t type = 0;
        while (type < 5 && u > kTypeCdf[type]) ++type;
        ev.event_type = ingest::kEventTypes[type];
        ev.fatalities = conflict_rng.geometric(kFatalityP[type]);
        ev.country = dist.raw_country;
        ev.admin1 = dist.raw_admin1;
        ev.admin2 = dist.raw_admin2;
        const auto& ring = dist.rect.outer.coords;
        ev.longitude = ring[0].lon + conflict_rng.uniform() * kDistrictSize;
        ev.latitude = ring[0].lat + conflict_rng.uniform() * kDistrictSize;
        world.events.push_back(std::move(ev));
        dist.total_events += 1;
      }
    }
  }

  // standardization of the lag-3 counts used by the escalation chain
  auto lag3_count = [&](size_t di, Period p) {
    int acc = 0;
    YearMonth m = p.ym();
    for (int i = 0; i < 3; ++i) {
      m = m.prev();
      auto it = world.monthly_counts.find({di, m});
      if (it != world.monthly_counts.end()) acc += it->second;
    }
    return acc;
  };
  double mean = 0.0;
  size_t cells = 0;
  for (size_t di = 0; di < world.districts.size(); ++di) {
    for (const Period& p : world.periods) {
      mean += lag3_count(di, p);
      ++cells;
    }
  }
  mean /= static_cast<double>(cells);
  double var = 0.0;
  for (size_t di = 0; di < world.districts.size(); ++di) {
    for (const Period& p : world.periods) {
      const double d = lag3_count(di, p) - mean;
      var += d * d;
    }
  }
  const double sd = cells > 1 ? std::sqrt(var / static_cast<double>(cells)) : 1.0;

  // phase chains: escalation pushed by standardized lagged conflicts
  CounterRng phase_rng(config.seed, kStreamPhases);
  for (size_t di = 0; di < world.districts.size(); ++di) {
    int phase;
    const double u0 = phase_rng.uniform();
    phase = u0 < 0.5 ? 1 : (u0 < 0.8 ? 2 : 3);
    world.phases[{di, world.periods.front()}] = phase;
    for (size_t pi = 1; pi < world.periods.size(); ++pi) {
      const Period p = world.periods[pi];
      const double z = sd > 0.0 ? (lag3_count(di, p) - mean) / sd : 0.0;
      const double p_up = sigmoid(config.escalation_base + world.districts[di].escalation_offset +
                                  config.coupling_beta * z);
      const double u = phase_rng.uniform();
      const double v = phase_rng.uniform();
      if (u < p_up) {
        phase = std::min(5, phase + 1);
      } else if (v >= config.phase_persistence) {
        phase = std::max(1, phase - 1);
      }
      world.phases[{di, p}] = phase;
    }
  }
  return world;
}

ingest::GeoLayer admin_layer(const World& world) {
  ingest::GeoLayer layer;
  for (const District& d : world.districts) {
    ingest::Feature f;
    f.geometry.parts.push_back(d.rect);
    f.attributes = {{"COUNTRY", d.raw_country}, {"ADMIN1", d.raw_admin1}, {"ADMIN2", d.raw_admin2}};
    layer.features.push_back(std::move(f));
  }
  return layer;
}

namespace {

geom::Polygon shifted(const geom::Polygon& p, double dx, double dy) {
  geom::Polygon out = p;
  for (auto& c : out.outer.coords) {
    c.lon += dx;
    c.lat += dy;
  }
  return out;
}

// per-(period, phase) deterministic jitter
std::pair<double, double> layer_jitter(const World& world, Period period, int phase) {
  CounterRng rng(world.config.seed ^ ((uint64_t)period.code() * 131 + (uint64_t)phase),
                 kStreamJitter);
  return {rng.uniform(-world.config.jitter, world.config.jitter),
          rng.uniform(-world.config.jitter, world.config.jitter)};
}

}  // namespace

ingest::GeoLayer fs_layer(const World& world, Period period) {
  ingest::GeoLayer layer;
  for (int phase = 1; phase <= 5; ++phase) {
    const auto [dx, dy] = layer_jitter(world, period, phase);
    ingest::Feature f;
    for (size_t di = 0; di < world.districts.size(); ++di) {
      auto it = world.phases.find({di, period});
      if (it == world.phases.end() || it->second != phase) continue;
      f.geometry.parts.push_back(shifted(world.districts[di].rect, dx, dy));
    }
    if (f.geometry.parts.empty()) continue;
    f.attributes = {{"CS", static_cast<int64_t>(phase)}};
    layer.features.push_back(std::move(f));
  }
  return layer;
}

// --------------------------------------------------------------------------
// Minimal shapefile emission (polygon type 5 + dBase III). This writer is the
// generator's own; the reader never depends on it.

namespace {

using Bytes = std::vector<uint8_t>;

void put_be32(Bytes& b, uint32_t v) {
  b.push_back((v >> 24) & 0xFF);
  b.push_back((v >> 16) & 0xFF);
  b.push_back((v >> 8) & 0xFF);
  b.push_back(v & 0xFF);
}
void put_le32(Bytes& b, uint32_t v) {
  b.push_back(v & 0xFF);
  b.push_back((v >> 8) & 0xFF);
  b.push_back((v >> 16) & 0xFF);
  b.push_back((v >> 24) & 0xFF);
}
void put_le16(Bytes& b, uint16_t v) {
  b.push_back(v & 0xFF);
  b.push_back((v >> 8) & 0xFF);
}
void put_f64(Bytes& b, double d) {
  const uint64_t v = std::bit_cast<uint64_t>(d);
  for (int i = 0; i < 8; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}

// clockwise outer ring, per the shapefile convention
std::vector<geom::Coord> cw_ring(const geom::Polygon& p) {
  std::vector<geom::Coord> ring = p.outer.coords;
  double acc = 0.0;
  for (size_t i = 0; i + 1 < ring.size(); ++i)
    acc += ring[i].lon * ring[i + 1].lat - ring[i + 1].lon * ring[i].lat;
  if (acc > 0) std::reverse(ring.begin(), ring.end());
  return ring;
}

Bytes encode_shp(const std::vector<ingest::Feature>& features) {
  std::vector<Bytes> payloads;
  double xmin = 1e300, ymin = 1e300, xmax = -1e300, ymax = -1e300;
  for (const auto& f : features) {
    Bytes p;
    put_le32(p, 5);
    double rxmin = 1e300, rymin = 1e300, rxmax = -1e300, rymax = -1e300;
    uint32_t npoints = 0;
    std::vector<std::vector<geom::Coord>> rings;
    for (const auto& part : f.geometry.parts) {
      rings.push_back(cw_ring(part));
      for (const auto& c : rings.back()) {
        rxmin = std::min(rxmin, c.lon);
        rxmax = std::max(rxmax, c.lon);
        rymin = std::min(rymin, c.lat);
        rymax = std::max(rymax, c.lat);
      }
      npoints += static_cast<uint32_t>(rings.back().size());
    }
    put_f64(p, rxmin);
    put_f64(p, rymin);
    put_f64(p, rxmax);
    put_f64(p, rymax);
    put_le32(p, static_cast<uint32_t>(rings.size()));
    put_le32(p, npoints);
    uint32_t start = 0;
    for (const auto& ring : rings) {
      put_le32(p, start);
      start += static_cast<uint32_t>(ring.size());
    }
    for (const auto& ring : rings) {
      for (const auto& c : ring) {
        put_f64(p, c.lon);
        put_f64(p, c.lat);
      }
    }
    xmin = std::min(xmin, rxmin);
    xmax = std::max(xmax, rxmax);
    ymin = std::min(ymin, rymin);
    ymax = std::max(ymax, rymax);
    payloads.push_back(std::move(p));
  }

  size_t total = 100;
  for (const auto& p : payloads) total += 8 + p.size();
  Bytes b;
  put_be32(b, 9994);
  for (int i = 0; i < 5; ++i) put_be32(b, 0);
  put_be32(b, static_cast<uint32_t>(total / 2));
  put_le32(b, 1000);
  put_le32(b, 5);
  put_f64(b, xmin);
  put_f64(b, ymin);
  put_f64(b, xmax);
  put_f64(b, ymax);
  for (int i = 0; i < 4; ++i) put_f64(b, 0.0);
  for (size_t i = 0; i < payloads.size(); ++i) {
    put_be32(b, static_cast<uint32_t>(i + 1));
    put_be32(b, static_cast<uint32_t>(payloads[i].size() / 2));
    b.insert(b.end(), payloads[i].begin(), payloads[i].end());
  }
  return b;
}

struct DbfField {
  std::string name;
  char type;
  uint8_t length;
};

Bytes encode_dbf(const std::vector<DbfField>& fields,
                 const std::vector<std::vector<std::string>>& rows) {
  Bytes b;
  b.push_back(0x03);
  b.push_back(24);
  b.push_back(1);
  b.push_back(1);
  put_le32(b, static_cast<uint32_t>(rows.size()));
  const uint16_t header_size = static_cast<uint16_t>(32 + fields.size() * 32 + 1);
  uint16_t record_size = 1;
  for (const auto& f : fields) record_size = static_cast<uint16_t>(record_size + f.length);
  put_le16(b, header_size);
  put_le16(b, record_size);
  for (int i = 0; i < 20; ++i) b.push_back(0);
  for (const auto& f : fields) {
    char name[11] = {0};
    std::memcpy(name, f.name.data(), std::min<size_t>(f.name.size(), 10));
    for (char ch : name) b.push_back(static_cast<uint8_t>(ch));
    b.push_back(static_cast<uint8_t>(f.type));
    for (int i = 0; i < 4; ++i) b.push_back(0);
    b.push_back(f.length);
    b.push_back(0);
    for (int i = 0; i < 14; ++i) b.push_back(0);
  }
  b.push_back(0x0D);
  for (const auto& row : rows) {
    b.push_back(' ');
    for (size_t i = 0; i < fields.size(); ++i) {
      std::string cell = i < row.size() ? row[i] : "";
      cell.resize(fields[i].length, ' ');
      for (char ch : cell) b.push_back(static_cast<uint8_t>(ch));
    }
  }
  b.push_back(0x1A);
  return b;
}

void write_bytes(const std::filesystem::path& path, const Bytes& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

EmittedPaths emit(const World& world, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  EmittedPaths paths;

  {
    const auto layer = admin_layer(world);
    std::vector<std::vector<std::string>> rows;
    for (const District& d : world.districts)
      rows.push_back({d.raw_country, d.raw_admin1, d.raw_admin2});
    paths.admin_shp = out_dir / "admin.shp";
    write_bytes(paths.admin_shp, encode_shp(layer.features));
    write_bytes(out_dir / "admin.dbf",
                encode_dbf({{"COUNTRY", 'C', 16}, {"ADMIN1", 'C', 16}, {"ADMIN2", 'C', 16}},
                           rows));
  }

  for (const Period& p : world.periods) {
    const auto layer = fs_layer(world, p);
    std::vector<std::vector<std::string>> rows;
    for (const auto& f : layer.features)
      rows.push_back({ingest::attr_to_string(*f.attr("CS"))});
    const auto base = out_dir / ("fs_" + std::to_string(p.code()));
    auto shp = base;
    shp += ".shp";
    auto dbf = base;
    dbf += ".dbf";
    write_bytes(shp, encode_shp(layer.features));
    write_bytes(dbf, encode_dbf({{"CS", 'N', 4}}, rows));
    paths.fs_shps.push_back({p, shp});
  }

  paths.acled_csv = out_dir / "conflicts.csv";
  {
    std::ofstream out(paths.acled_csv, std::ios::binary);
    if (!out) throw Error("cannot write " + paths.acled_csv.string());
    ingest::write_acled_csv(out, world.events);
  }

  paths.truth_json = out_dir / "truth.json";
  {
    nlohmann::json truth;
    truth["seed"] = world.config.seed;
    truth["coupling_beta"] = world.config.coupling_beta;
    truth["n_districts"] = world.districts.size();
    truth["periods"] = nlohmann::json::array();
    for (const Period& p : world.periods) truth["periods"].push_back(p.code());
    truth["districts"] = nlohmann::json::array();
    for (const District& d : world.districts) {
      truth["districts"].push_back({{"country", d.unit.country},
                                    {"admin1", d.unit.admin1},
                                    {"admin2", d.unit.admin2},
                                    {"hot", d.hot},
                                    {"burst_months", d.burst_months},
                                    {"total_events", d.total_events}});
    }
    std::ofstream out(paths.truth_json, std::ios::binary);
    if (!out) throw Error("cannot write " + paths.truth_json.string());
    out << truth.dump(2) << "\n";
  }
  return paths;
}

}  // namespace ipcfuse::synth
