#pragma once

#include <array>
#include <compare>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ipcfuse/acled.hpp"
#include "ipcfuse/parallel.hpp"
#include "ipcfuse/period.hpp"
#include "ipcfuse/shapefile.hpp"

namespace ipcfuse::fuse {

/// District-level analysis unit; all names in normalized form.
struct AdminUnit {
  std::string country;
  std::string admin1;
  std::string admin2;

  friend auto operator<=>(const AdminUnit&, const AdminUnit&) = default;
};

/// One food-security observation: district x publication period.
struct FSRecord {
  AdminUnit unit;
  Period period;
  int phase = 1;      // 1..5
  double area = 0.0;  // square degrees covered by this unit at this phase
};

/// Conflict counts for one district and calendar month.
struct ConflictAggregate {
  AdminUnit unit;
  YearMonth ym;
  int count_total = 0;
  std::array<int, 6> count_by_type{};  // indexed by ingest::EventType
  int fatalities = 0;
};

/// District x period row joining the current phase with lagged conflict
/// features. The area is carried along for downstream area weighting; it is
/// not part of the serialized table.
struct FusedRecord {
  AdminUnit unit;
  Period period;
  int phase = 1;
  int lag3_conflicts = 0;
  int lag3_fatalities = 0;
  std::array<int, 6> lag3_by_type{};
  long cum24_conflicts = 0;
  long cum24_fatalities = 0;
  double area = 0.0;
};

struct OverlayOptions {
  std::string phase_field = "CS";
  std::string country_field = "COUNTRY";
  std::string admin1_field = "ADMIN1";
  std::string admin2_field = "ADMIN2";
  double sliver_threshold = 0.005;
};

struct OverlayStats {
  size_t pairs_intersected = 0;
  size_t records = 0;
  size_t dropped_out_of_range_phase = 0;  // phases outside 1..5
  double area_unfiltered = 0.0;           // before sliver removal
  double area_kept = 0.0;                 // after sliver removal
};

/// Step 1: pairwise intersection of the phase layer with the admin layer,
/// sliver-filtered, tagged with both attribute sets. Throws SchemaError when
/// a required attribute is missing. Output order is deterministic and
/// independent of the execution policy.
std::vector<FSRecord> overlay(const ingest::GeoLayer& fs_layer, const ingest::GeoLayer& admin_layer,
                              Period period, const OverlayOptions& options = {},
                              Exec exec = Exec::Parallel, OverlayStats* stats = nullptr);

/// One record per (unit, period): worst (maximum) phase, areas summed.
std::vector<FSRecord> dedup_worst(std::vector<FSRecord> records);

/// Step 2: per (unit, calendar month) counts, overall, by type, fatalities.
/// Event names are normalized here.
std::vector<ConflictAggregate> aggregate_conflicts(std::span<const ingest::ConflictEvent> events);

/// The lag_months calendar months strictly before the publication month,
/// most recent last: lag_window(202210) = [202207, 202208, 202209].
std::vector<YearMonth> lag_window(Period p, int lag_months = 3);

struct JoinQuality {
  struct CountryRow {
    std::string country;
    size_t fs_units = 0;       // distinct districts on the FS side
    size_t matched_units = 0;  // of those, districts with any conflict row
  };
  std::vector<CountryRow> per_country;
  size_t records = 0;
  size_t records_zero_filled = 0;  // fused rows whose unit has no conflict data at all
};

/// Step 3: every FSRecord becomes exactly one FusedRecord; conflict fields
/// are sums over the lag window; cumulative fields over the preceding
/// cum_window months. Units absent from the aggregates are zero-filled.
std::vector<FusedRecord> lag_join(std::span<const FSRecord> fs,
                                  std::span<const ConflictAggregate> aggs, int lag_months = 3,
                                  int cum_window = 24, JoinQuality* quality = nullptr);

/// Sums of conflicts and fatalities over the cum_window calendar months
/// strictly before p's month for one unit.
std::pair<long, long> rolling_24m(std::span<const ConflictAggregate> aggs, Period p,
                                  const AdminUnit& unit, int cum_window = 24);

/// Canonical fused table: country, admin1, admin2, period, phase,
/// lag3_conflicts, lag3_fatalities, one column per event type,
/// cum24_conflicts, cum24_fatalities.
void write_fused_csv(std::ostream& out, std::span<const FusedRecord> records);
std::vector<FusedRecord> read_fused_csv(std::istream& in);

void write_join_quality_csv(std::ostream& out, const JoinQuality& q);

}  // namespace ipcfuse::fuse
