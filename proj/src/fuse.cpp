#include "ipcfuse/fuse.hpp"

#include <cstdio>

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "ipcfuse/clip.hpp"
#include "ipcfuse/csv.hpp"
#include "ipcfuse/errors.hpp"
#include "ipcfuse/names.hpp"

namespace ipcfuse::fuse {

namespace {

using ingest::AttrValue;
using ingest::Feature;
using ingest::GeoLayer;

std::string required_attr(const Feature& f, const std::string& field) {
  const AttrValue* v = f.attr(field);
  if (!v) throw SchemaError("feature is missing required attribute: " + field);
  return ingest::attr_to_string(*v);
}

std::optional<int> phase_of(const Feature& f, const std::string& field) {
  const AttrValue* v = f.attr(field);
  if (!v) throw SchemaError("feature is missing required attribute: " + field);
  if (const auto* i = std::get_if<int64_t>(v)) return static_cast<int>(*i);
  if (const auto* d = std::get_if<double>(v)) return static_cast<int>(*d);
  try {
    return std::stoi(std::get<std::string>(*v));
  } catch (...) {
    return std::nullopt;
  }
}

struct CanonicalOrder {
  bool operator()(const FSRecord& a, const FSRecord& b) const {
    if (a.unit != b.unit) return a.unit < b.unit;
    return a.period < b.period;
  }
};

}  // namespace

std::vector<FSRecord> overlay(const GeoLayer& fs_layer, const GeoLayer& admin_layer, Period period,
                              const OverlayOptions& options, Exec exec, OverlayStats* stats) {
  struct Task {
    const Feature* fs;
    const Feature* admin;
    int phase;
    AdminUnit unit;
    geom::Box fs_box, admin_box;
  };

  OverlayStats local;
  std::vector<Task> tasks;
  std::vector<std::pair<int, geom::Box>> fs_meta;  // validated phase + bbox per fs feature
  for (const Feature& f : fs_layer.features) {
    const auto phase = phase_of(f, options.phase_field);
    if (!phase || *phase < 1 || *phase > 5) {
      ++local.dropped_out_of_range_phase;
      fs_meta.push_back({-1, {}});
      continue;
    }
    fs_meta.push_back({*phase, geom::bounding_box(f.geometry)});
  }
  for (const Feature& a : admin_layer.features) {
    AdminUnit unit{normalize_name(required_attr(a, options.country_field)),
                   normalize_name(required_attr(a, options.admin1_field)),
                   normalize_name(required_attr(a, options.admin2_field))};
    const geom::Box abox = geom::bounding_box(a.geometry);
    for (size_t i = 0; i < fs_layer.features.size(); ++i) {
      if (fs_meta[i].first < 0) continue;
      if (!geom::boxes_overlap(fs_meta[i].second, abox)) continue;
      tasks.push_back({&fs_layer.features[i], &a, fs_meta[i].first, unit, fs_meta[i].second, abox});
    }
  }

  struct Slot {
    bool hit = false;
    double area_unfiltered = 0.0;
    double area_kept = 0.0;
  };
  std::vector<Slot> slots(tasks.size());

  auto work = [&](size_t t) {
    const Task& task = tasks[t];
    geom::MultiPolygon inter = geom::intersect(task.fs->geometry, task.admin->geometry);
    if (inter.empty()) return;
    const double full = geom::polygon_area(inter);
    geom::MultiPolygon kept = geom::filter_slivers(inter, options.sliver_threshold);
    Slot& s = slots[t];
    s.area_unfiltered = full;
    if (kept.empty()) return;
    s.area_kept = geom::polygon_area(kept);
    s.hit = true;
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (size_t t = 0; t < tasks.size(); ++t) work(t);
  } else {
    for (size_t t = 0; t < tasks.size(); ++t) work(t);
  }

  std::vector<FSRecord> out;
  for (size_t t = 0; t < tasks.size(); ++t) {
    local.area_unfiltered += slots[t].area_unfiltered;
    if (!slots[t].hit) continue;
    ++local.pairs_intersected;
    local.area_kept += slots[t].area_kept;
    out.push_back({tasks[t].unit, period, tasks[t].phase, slots[t].area_kept});
  }
  std::sort(out.begin(), out.end(), CanonicalOrder{});
  local.records = out.size();
  if (stats) *stats = local;
  return out;
}

std::vector<FSRecord> dedup_worst(std::vector<FSRecord> records) {
  std::map<std::pair<AdminUnit, Period>, FSRecord> best;
  for (FSRecord& r : records) {
    auto key = std::make_pair(r.unit, r.period);
    auto it = best.find(key);
    if (it == best.end()) {
      best.emplace(std::move(key), std::move(r));
    } else {
      it->second.phase = std::max(it->second.phase, r.phase);
      it->second.area += r.area;
    }
  }
  std::vector<FSRecord> out;
  out.reserve(best.size());
  for (auto& [key, rec] : best) out.push_back(std::move(rec));
  return out;  // map iteration is already canonical (unit, period) order
}

std::vector<ConflictAggregate> aggregate_conflicts(std::span<const ingest::ConflictEvent> events) {
  std::map<std::pair<AdminUnit, YearMonth>, ConflictAggregate> acc;
  for (const auto& ev : events) {
    AdminUnit unit{normalize_name(ev.country), normalize_name(ev.admin1),
                   normalize_name(ev.admin2)};
    const YearMonth ym = ingest::year_month_of(ev.event_date);
    ConflictAggregate& agg = acc[{unit, ym}];
    agg.unit = unit;
    agg.ym = ym;
    agg.count_total += 1;
    agg.count_by_type[static_cast<size_t>(ev.event_type)] += 1;
    agg.fatalities += ev.fatalities;
  }
  std::vector<ConflictAggregate> out;
  out.reserve(acc.size());
  for (auto& [key, agg] : acc) out.push_back(std::move(agg));
  return out;
}

std::vector<YearMonth> lag_window(Period p, int lag_months) {
  std::vector<YearMonth> months(static_cast<size_t>(lag_months));
  YearMonth m = p.ym();
  for (int i = lag_months - 1; i >= 0; --i) {
    m = m.prev();
    months[static_cast<size_t>(i)] = m;
  }
  return months;
}

namespace {

using AggIndex = std::map<std::pair<AdminUnit, YearMonth>, const ConflictAggregate*>;

AggIndex index_aggs(std::span<const ConflictAggregate> aggs) {
  AggIndex idx;
  for (const auto& a : aggs) idx[{a.unit, a.ym}] = &a;
  return idx;
}

}  // namespace

std::vector<FusedRecord> lag_join(std::span<const FSRecord> fs,
                                  std::span<const ConflictAggregate> aggs, int lag_months,
                                  int cum_window, JoinQuality* quality) {
  const AggIndex idx = index_aggs(aggs);
  std::set<AdminUnit> units_with_conflicts;
  for (const auto& a : aggs) units_with_conflicts.insert(a.unit);

  std::vector<FusedRecord> out;
  out.reserve(fs.size());
  for (const FSRecord& r : fs) {
    FusedRecord f;
    f.unit = r.unit;
    f.period = r.period;
    f.phase = r.phase;
    f.area = r.area;
    for (const YearMonth& m : lag_window(r.period, lag_months)) {
      auto it = idx.find({r.unit, m});
      if (it == idx.end()) continue;
      f.lag3_conflicts += it->second->count_total;
      f.lag3_fatalities += it->second->fatalities;
      for (size_t k = 0; k < f.lag3_by_type.size(); ++k)
        f.lag3_by_type[k] += it->second->count_by_type[k];
    }
    YearMonth m = r.period.ym();
    for (int i = 0; i < cum_window; ++i) {
      m = m.prev();
      auto it = idx.find({r.unit, m});
      if (it == idx.end()) continue;
      f.cum24_conflicts += it->second->count_total;
      f.cum24_fatalities += it->second->fatalities;
    }
    out.push_back(std::move(f));
  }
  std::sort(out.begin(), out.end(), [](const FusedRecord& a, const FusedRecord& b) {
    if (a.unit != b.unit) return a.unit < b.unit;
    return a.period < b.period;
  });

  if (quality) {
    JoinQuality q;
    q.records = out.size();
    std::map<std::string, std::set<AdminUnit>> by_country;
    for (const FSRecord& r : fs) by_country[r.unit.country].insert(r.unit);
    for (const auto& [country, units] : by_country) {
      JoinQuality::CountryRow row;
      row.country = country;
      row.fs_units = units.size();
      for (const AdminUnit& u : units) {
        if (units_with_conflicts.count(u)) ++row.matched_units;
      }
      q.per_country.push_back(std::move(row));
    }
    for (const FusedRecord& f : out) {
      if (!units_with_conflicts.count(f.unit)) ++q.records_zero_filled;
    }
    *quality = q;
  }
  return out;
}

std::pair<long, long> rolling_24m(std::span<const ConflictAggregate> aggs, Period p,
                                  const AdminUnit& unit, int cum_window) {
  const AggIndex idx = index_aggs(aggs);
  long conflicts = 0, fatalities = 0;
  YearMonth m = p.ym();
  for (int i = 0; i < cum_window; ++i) {
    m = m.prev();
    auto it = idx.find({unit, m});
    if (it == idx.end()) continue;
    conflicts += it->second->count_total;
    fatalities += it->second->fatalities;
  }
  return {conflicts, fatalities};
}

void write_fused_csv(std::ostream& out, std::span<const FusedRecord> records) {
  std::vector<std::string> row = {"country", "admin1", "admin2", "period", "phase",
                                  "lag3_conflicts", "lag3_fatalities"};
  for (ingest::EventType t : ingest::kEventTypes) row.emplace_back(ingest::column_name(t));
  row.emplace_back("cum24_conflicts");
  row.emplace_back("cum24_fatalities");
  csv::write_row(out, row);
  for (const FusedRecord& r : records) {
    row = {r.unit.country,
           r.unit.admin1,
           r.unit.admin2,
           std::to_string(r.period.code()),
           std::to_string(r.phase),
           std::to_string(r.lag3_conflicts),
           std::to_string(r.lag3_fatalities)};
    for (int v : r.lag3_by_type) row.push_back(std::to_string(v));
    row.push_back(std::to_string(r.cum24_conflicts));
    row.push_back(std::to_string(r.cum24_fatalities));
    csv::write_row(out, row);
  }
}

std::vector<FusedRecord> read_fused_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next_row(row)) throw SchemaError("fused table: missing header");
  if (row.size() != 15) throw SchemaError("fused table: unexpected column count");
  std::vector<FusedRecord> out;
  while (reader.next_row(row)) {
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 15) throw RowError(reader.row_number(), "unexpected field count");
    FusedRecord r;
    r.unit = {row[0], row[1], row[2]};
    const auto p = Period::from_code(std::stoi(row[3]));
    if (!p) throw RowError(reader.row_number(), "bad period: " + row[3]);
    r.period = *p;
    r.phase = std::stoi(row[4]);
    r.lag3_conflicts = std::stoi(row[5]);
    r.lag3_fatalities = std::stoi(row[6]);
    for (size_t k = 0; k < 6; ++k) r.lag3_by_type[k] = std::stoi(row[7 + k]);
    r.cum24_conflicts = std::stol(row[13]);
    r.cum24_fatalities = std::stol(row[14]);
    out.push_back(std::move(r));
  }
  return out;
}

void write_join_quality_csv(std::ostream& out, const JoinQuality& q) {
  csv::write_row(out, std::vector<std::string>{"country", "fs_units", "matched_units",
                                               "match_rate"});
  for (const auto& row : q.per_country) {
    const double rate = row.fs_units ? static_cast<double>(row.matched_units) /
                                           static_cast<double>(row.fs_units)
                                     : 0.0;
    char rate_s[32];
    std::snprintf(rate_s, sizeof rate_s, "%.4f", rate);
    csv::write_row(out, std::vector<std::string>{row.country, std::to_string(row.fs_units),
                                                 std::to_string(row.matched_units), rate_s});
  }
}

}  // namespace ipcfuse::fuse
