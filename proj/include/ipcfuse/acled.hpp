#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ipcfuse/period.hpp"

namespace ipcfuse::ingest {

/// The six event categories of the conflict dataset.
enum class EventType : uint8_t {
  Battles,
  ExplosionsRemoteViolence,
  Protests,
  Riots,
  StrategicDevelopments,
  ViolenceAgainstCivilians,
};

inline constexpr std::array<EventType, 6> kEventTypes = {
    EventType::Battles,           EventType::ExplosionsRemoteViolence,
    EventType::Protests,          EventType::Riots,
    EventType::StrategicDevelopments, EventType::ViolenceAgainstCivilians,
};

std::string_view to_string(EventType t);
std::optional<EventType> event_type_from(std::string_view s);
/// Lower-case snake-case identifier used for CSV column names.
std::string_view column_name(EventType t);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;

  friend auto operator<=>(const Date&, const Date&) = default;
};

/// Parses strict YYYY-MM-DD and validates the calendar (leap years included).
std::optional<Date> parse_date(std::string_view s);

/// The calendar year-month containing a date.
inline YearMonth year_month_of(const Date& d) { return {d.year, d.month}; }

struct ConflictEvent {
  Date event_date;
  EventType event_type = EventType::Battles;
  std::string country;
  std::string admin1;
  std::string admin2;
  double latitude = 0.0;
  double longitude = 0.0;
  int fatalities = 0;
};

struct AcledReport {
  size_t rows_total = 0;
  size_t rows_skipped = 0;
};

/// Reads conflict events from CSV. The header must contain event_date,
/// event_type, country, admin1, admin2, latitude, longitude, fatalities
/// (case-insensitive); unknown extra columns pass through ignored. Bad rows
/// abort in strict mode, otherwise they are skipped and counted.
std::vector<ConflictEvent> parse_acled(std::istream& in, bool strict = false,
                                       AcledReport* report = nullptr);

/// CSV writer matching the reader's required schema.
void write_acled_csv(std::ostream& out, std::span<const ConflictEvent> events);

}  // namespace ipcfuse::ingest
