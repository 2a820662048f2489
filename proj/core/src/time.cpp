#include "sda/time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

#include "sda/error.hpp"

namespace sda {

namespace {

constexpr std::int64_t kMsPerDay = 86'400'000;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int read_int(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw InputError("timestamp too short: " + std::string(text));
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
  if (ec != std::errc() || ptr != text.data() + pos + len) {
    throw InputError("bad timestamp: " + std::string(text));
  }
  return value;
}

void expect(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw InputError("bad timestamp: " + std::string(text));
  }
}

}  // namespace

std::int64_t year_start_ms(int year) {
  using namespace std::chrono;
  const sys_days d{std::chrono::year{year} / January / 1};
  return static_cast<std::int64_t>(d.time_since_epoch().count()) * kMsPerDay;
}

std::string to_iso8601(UtcTime t) {
  using namespace std::chrono;
  const std::int64_t day = floor_div(t.ms, kMsPerDay);
  const std::int64_t rem = t.ms - day * kMsPerDay;
  const year_month_day ymd{sys_days{days{day}}};
  const int hh = static_cast<int>(rem / 3'600'000);
  const int mm = static_cast<int>(rem / 60'000 % 60);
  const int ss = static_cast<int>(rem / 1000 % 60);
  const int ms = static_cast<int>(rem % 1000);
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), hh, mm, ss, ms);
  return buf;
}

UtcTime parse_iso8601(std::string_view text) {
  using namespace std::chrono;
  const int y = read_int(text, 0, 4);
  expect(text, 4, '-');
  const int mo = read_int(text, 5, 2);
  expect(text, 7, '-');
  const int d = read_int(text, 8, 2);
  expect(text, 10, 'T');
  const int hh = read_int(text, 11, 2);
  expect(text, 13, ':');
  const int mi = read_int(text, 14, 2);
  expect(text, 16, ':');
  const int ss = read_int(text, 17, 2);
  std::size_t pos = 19;
  int millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    int scale = 100;
    while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
      millis += (text[pos] - '0') * scale;
      scale /= 10;
      ++pos;
    }
  }
  if (pos < text.size() && text[pos] == 'Z') ++pos;
  if (pos != text.size()) throw InputError("bad timestamp: " + std::string(text));

  const year_month_day ymd{std::chrono::year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || hh > 23 || mi > 59 || ss > 60) {
    throw InputError("timestamp out of range: " + std::string(text));
  }
  const std::int64_t days_since = sys_days{ymd}.time_since_epoch().count();
  return UtcTime{days_since * kMsPerDay + hh * 3'600'000LL + mi * 60'000LL + ss * 1000LL +
                 millis};
}

}  // namespace sda
