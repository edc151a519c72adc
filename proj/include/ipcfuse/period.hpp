#pragma once

#include <compare>
#include <optional>
#include <string>

namespace ipcfuse {

/// Calendar year-month, serialized as yyyymm (e.g. 202202).
struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  int code() const { return year * 100 + month; }

  static std::optional<YearMonth> from_code(int yyyymm) {
    const int y = yyyymm / 100, m = yyyymm % 100;
    if (m < 1 || m > 12) return std::nullopt;
    return YearMonth{y, m};
  }

  YearMonth prev() const { return month == 1 ? YearMonth{year - 1, 12} : YearMonth{year, month - 1}; }
  YearMonth next() const { return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1}; }

  friend auto operator<=>(const YearMonth&, const YearMonth&) = default;
};

/// Publication period of the tri-annual assessment cycle: February, June and
/// October of each year.
struct Period {
  int year = 0;
  int month = 2;  // one of {2, 6, 10}

  static bool publication_month(int m) { return m == 2 || m == 6 || m == 10; }

  static std::optional<Period> from_code(int yyyymm) {
    const int y = yyyymm / 100, m = yyyymm % 100;
    if (!publication_month(m)) return std::nullopt;
    return Period{y, m};
  }

  int code() const { return year * 100 + month; }
  YearMonth ym() const { return {year, month}; }

  Period prev() const {
    if (month == 2) return {year - 1, 10};
    return {year, month == 6 ? 2 : 6};
  }
  Period next() const {
    if (month == 10) return {year + 1, 2};
    return {year, month == 2 ? 6 : 10};
  }
  /// Same period in the previous year.
  Period last_year() const { return {year - 1, month}; }

  friend auto operator<=>(const Period&, const Period&) = default;
};

inline std::string to_string(const YearMonth& ym) { return std::to_string(ym.code()); }
inline std::string to_string(const Period& p) { return std::to_string(p.code()); }

}  // namespace ipcfuse
