#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sda {

/// A UTC instant as integer milliseconds since the Unix epoch.
struct UtcTime {
  std::int64_t ms = 0;

  constexpr auto operator<=>(const UtcTime&) const = default;

  constexpr UtcTime plus_seconds(double s) const {
    return UtcTime{ms + static_cast<std::int64_t>(s * 1000.0 + (s >= 0 ? 0.5 : -0.5))};
  }
  constexpr double seconds_since(UtcTime other) const {
    return static_cast<double>(ms - other.ms) / 1000.0;
  }
};

/// 2000-01-01T12:00:00Z
inline constexpr UtcTime kJ2000{946728000000};

/// Milliseconds at 00:00:00Z on January 1st of `year`.
std::int64_t year_start_ms(int year);

/// Formats as `YYYY-MM-DDTHH:MM:SS.mmmZ`.
std::string to_iso8601(UtcTime t);

/// Accepts `YYYY-MM-DDTHH:MM:SS[.fff]Z` (the trailing Z is optional).
/// Throws InputError on anything else.
UtcTime parse_iso8601(std::string_view text);

}  // namespace sda
