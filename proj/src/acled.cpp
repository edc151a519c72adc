#include "ipcfuse/acled.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>

#include "ipcfuse/csv.hpp"
#include "ipcfuse/errors.hpp"

namespace ipcfuse::ingest {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && leap(y)) return 29;
  return d[m - 1];
}

std::optional<double> parse_double(std::string_view s) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

std::optional<long> parse_long(std::string_view s) {
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::Battles: return "Battles";
    case EventType::ExplosionsRemoteViolence: return "Explosions/Remote violence";
    case EventType::Protests: return "Protests";
    case EventType::Riots: return "Riots";
    case EventType::StrategicDevelopments: return "Strategic developments";
    case EventType::ViolenceAgainstCivilians: return "Violence against civilians";
  }
  return "";
}

std::string_view column_name(EventType t) {
  switch (t) {
    case EventType::Battles: return "battles";
    case EventType::ExplosionsRemoteViolence: return "explosions_remote_violence";
    case EventType::Protests: return "protests";
    case EventType::Riots: return "riots";
    case EventType::StrategicDevelopments: return "strategic_developments";
    case EventType::ViolenceAgainstCivilians: return "violence_against_civilians";
  }
  return "";
}

std::optional<EventType> event_type_from(std::string_view s) {
  const std::string key = lower(s);
  for (EventType t : kEventTypes) {
    if (key == lower(to_string(t))) return t;
  }
  return std::nullopt;
}

std::optional<Date> parse_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  const auto y = parse_long(s.substr(0, 4));
  const auto m = parse_long(s.substr(5, 2));
  const auto d = parse_long(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  if (*m < 1 || *m > 12) return std::nullopt;
  if (*d < 1 || *d > days_in_month(static_cast<int>(*y), static_cast<int>(*m))) return std::nullopt;
  return Date{static_cast<int>(*y), static_cast<int>(*m), static_cast<int>(*d)};
}

std::vector<ConflictEvent> parse_acled(std::istream& in, bool strict, AcledReport* report) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next_row(row)) throw SchemaError("missing header row");

  static const char* kRequired[] = {"event_date", "event_type", "country",   "admin1",
                                    "admin2",     "latitude",   "longitude", "fatalities"};
  std::array<int, 8> col;
  col.fill(-1);
  for (size_t i = 0; i < row.size(); ++i) {
    const std::string name = lower(row[i]);
    for (size_t k = 0; k < 8; ++k) {
      if (name == kRequired[k]) col[k] = static_cast<int>(i);
    }
  }
  for (size_t k = 0; k < 8; ++k) {
    if (col[k] < 0) throw SchemaError(std::string("missing required column: ") + kRequired[k]);
  }
  const size_t min_fields =
      static_cast<size_t>(*std::max_element(col.begin(), col.end())) + 1;

  std::vector<ConflictEvent> events;
  AcledReport local;
  while (reader.next_row(row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // blank trailing line
    ++local.rows_total;
    const size_t rownum = reader.row_number();
    auto fail = [&](const std::string& why) {
      if (strict) throw RowError(rownum, why);
      ++local.rows_skipped;
    };
    if (row.size() < min_fields) {
      fail("too few fields");
      continue;
    }
    const auto date = parse_date(row[col[0]]);
    if (!date) {
      fail("unparseable date: " + row[col[0]]);
      continue;
    }
    const auto type = event_type_from(row[col[1]]);
    if (!type) {
      fail("unknown event type: " + row[col[1]]);
      continue;
    }
    const auto lat = parse_double(row[col[5]]);
    const auto lon = parse_double(row[col[6]]);
    if (!lat || !lon) {
      fail("unparseable coordinates");
      continue;
    }
    const auto fat = parse_long(row[col[7]]);
    if (!fat || *fat < 0) {
      fail("bad fatalities: " + row[col[7]]);
      continue;
    }
    ConflictEvent ev;
    ev.event_date = *date;
    ev.event_type = *type;
    ev.country = row[col[2]];
    ev.admin1 = row[col[3]];
    ev.admin2 = row[col[4]];
    ev.latitude = *lat;
    ev.longitude = *lon;
    ev.fatalities = static_cast<int>(*fat);
    events.push_back(std::move(ev));
  }
  if (report) *report = local;
  return events;
}

void write_acled_csv(std::ostream& out, std::span<const ConflictEvent> events) {
  const std::vector<std::string> header = {"event_date", "event_type", "country",   "admin1",
                                           "admin2",     "latitude",   "longitude", "fatalities"};
  csv::write_row(out, header);
  for (const auto& ev : events) {
    char date[16], lat[32], lon[32];
    std::snprintf(date, sizeof date, "%04d-%02d-%02d", ev.event_date.year, ev.event_date.month,
                  ev.event_date.day);
    std::snprintf(lat, sizeof lat, "%.6f", ev.latitude);
    std::snprintf(lon, sizeof lon, "%.6f", ev.longitude);
    const std::vector<std::string> row = {date,
                                          std::string(to_string(ev.event_type)),
                                          ev.country,
                                          ev.admin1,
                                          ev.admin2,
                                          lat,
                                          lon,
                                          std::to_string(ev.fatalities)};
    csv::write_row(out, row);
  }
}

}  // namespace ipcfuse::ingest
