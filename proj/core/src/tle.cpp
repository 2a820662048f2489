#include "sda/tle.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>

#include "sda/constants.hpp"

namespace sda {

namespace {

constexpr std::size_t kLineLength = 69;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string_view trim_right(std::string_view s) {
  const auto last = s.find_last_not_of(" \t\r\n");
  return last == std::string_view::npos ? std::string_view{} : s.substr(0, last + 1);
}

/// Column slice using the 1-based inclusive numbering of the format tables.
std::string_view cols(std::string_view line, std::size_t first, std::size_t last) {
  return line.substr(first - 1, last - first + 1);
}

template <typename T>
T to_number(std::string_view field, int line, const char* what) {
  const std::string_view t = trim(field);
  T value{};
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw TleParseError(line, std::string("unparseable ") + what + " field '" +
                                  std::string(field) + "'");
  }
  return value;
}

/// Signed decimal with an optional explicit sign and no leading zero: "+.00000035".
double signed_decimal(std::string_view field, int line, const char* what) {
  const char sign = field.empty() ? ' ' : field.front();
  std::string_view rest = field;
  if (sign == '+' || sign == '-' || sign == ' ') rest.remove_prefix(1);
  const double magnitude = to_number<double>(rest, line, what);
  return sign == '-' ? -magnitude : magnitude;
}

ImpliedExponent implied_exponent(std::string_view field, int line, const char* what) {
  // s ddddd e d
  const char sign = field[0];
  if (sign != ' ' && sign != '+' && sign != '-') {
    throw TleParseError(line, std::string("unparseable ") + what + " field '" +
                                  std::string(field) + "'");
  }
  const char exp_sign = field[6];
  if (exp_sign != '+' && exp_sign != '-' && exp_sign != ' ') {
    throw TleParseError(line, std::string("unparseable ") + what + " exponent '" +
                                  std::string(field) + "'");
  }
  ImpliedExponent out;
  const int digits = to_number<int>(field.substr(1, 5), line, what);
  const int exp_digit = to_number<int>(field.substr(7, 1), line, what);
  out.mantissa = sign == '-' ? -digits : digits;
  out.exponent = static_cast<std::int8_t>(exp_sign == '-' ? -exp_digit : exp_digit);
  // The sign only survives formatting when the exponent is zero.
  out.negative_zero_exponent = out.exponent != 0 || exp_sign == '-';
  return out;
}

char sign_char(bool negative, const TleStyle& style) {
  if (negative) return '-';
  return style.explicit_plus ? '+' : ' ';
}

std::string format_implied_exponent(const ImpliedExponent& v, const TleStyle& style) {
  char buf[16];
  const int exp_abs = v.exponent < 0 ? -v.exponent : v.exponent;
  const bool exp_negative = v.exponent < 0 || (v.exponent == 0 && v.negative_zero_exponent);
  std::snprintf(buf, sizeof buf, "%c%05d%c%d", sign_char(v.mantissa < 0, style),
                v.mantissa < 0 ? -v.mantissa : v.mantissa, exp_negative ? '-' : '+', exp_abs);
  return buf;
}

void check_data_line(std::string_view line, char which, int line_no) {
  if (line.size() != kLineLength) {
    throw TleParseError(line_no, "expected " + std::to_string(kLineLength) +
                                     " characters, found " + std::to_string(line.size()));
  }
  if (line[0] != which || line[1] != ' ') {
    throw TleParseError(line_no, std::string("expected line to start with '") + which + " '");
  }
  const char found = line[68];
  const int expected = tle_checksum(line);
  if (found < '0' || found > '9' || found - '0' != expected) {
    throw TleParseError(line_no, "checksum mismatch: expected " + std::to_string(expected) +
                                     ", found '" + std::string(1, found) + "'");
  }
}

void check_range(double value, double lo, double hi, bool hi_inclusive, int line_no,
                 const char* what) {
  const bool ok = value >= lo && (hi_inclusive ? value <= hi : value < hi);
  if (!ok) throw TleParseError(line_no, std::string(what) + " out of range");
}

}  // namespace

double ImpliedExponent::value() const {
  return static_cast<double>(mantissa) * 1e-5 * std::pow(10.0, exponent);
}

int TleRecord::full_epoch_year() const {
  return epoch_year < 57 ? 2000 + epoch_year : 1900 + epoch_year;
}

TleParseError::TleParseError(int line, const std::string& message)
    : InputError("line:" + std::to_string(line) + ": " + message),
      line_(line),
      message_(message) {}

int tle_checksum(std::string_view line) {
  int sum = 0;
  for (std::size_t i = 0; i < line.size() && i < kLineLength - 1; ++i) {
    const char c = line[i];
    if (c >= '0' && c <= '9') {
      sum += c - '0';
    } else if (c == '-') {
      sum += 1;
    }
  }
  return sum % 10;
}

TleRecord parse_tle(std::string_view name_line, std::string_view line1,
                    std::string_view line2, int line1_number) {
  const int n1 = line1_number;
  const int n2 = line1_number + 1;
  line1 = trim_right(line1);
  line2 = trim_right(line2);
  check_data_line(line1, '1', n1);
  check_data_line(line2, '2', n2);

  TleRecord r;
  r.norad_id = to_number<int>(cols(line1, 3, 7), n1, "satellite number");
  const int id2 = to_number<int>(cols(line2, 3, 7), n2, "satellite number");
  if (id2 != r.norad_id) {
    throw TleParseError(n2, "satellite number " + std::to_string(id2) +
                                " does not match line 1 (" + std::to_string(r.norad_id) + ")");
  }
  if (r.norad_id <= 0) throw TleParseError(n1, "satellite number must be positive");

  r.classification = line1[7];
  r.intl_designator = std::string(trim(cols(line1, 10, 17)));
  r.epoch_year = to_number<int>(cols(line1, 19, 20), n1, "epoch year");
  r.epoch_day = to_number<double>(cols(line1, 21, 32), n1, "epoch day");
  if (r.epoch_day < 1.0 || r.epoch_day >= 367.0) throw TleParseError(n1, "epoch day out of range");

  const std::string_view ndot = cols(line1, 34, 43);
  const std::string_view nddot = cols(line1, 45, 52);
  const std::string_view bstar = cols(line1, 54, 61);
  r.mean_motion_dot = signed_decimal(ndot, n1, "mean motion derivative");
  if (std::abs(r.mean_motion_dot) >= 1.0) {
    throw TleParseError(n1, "mean motion derivative out of range");
  }
  r.mean_motion_ddot = implied_exponent(nddot, n1, "mean motion second derivative");
  r.b_star_field = implied_exponent(bstar, n1, "drag term");
  r.ephemeris_type = to_number<int>(cols(line1, 63, 63), n1, "ephemeris type");
  r.element_set_number = to_number<int>(cols(line1, 65, 68), n1, "element set number");

  const std::string_view incl = cols(line2, 9, 16);
  const std::string_view raan = cols(line2, 18, 25);
  const std::string_view argp = cols(line2, 35, 42);
  const std::string_view mean_anom = cols(line2, 44, 51);
  const std::string_view motion = cols(line2, 53, 63);
  const std::string_view rev = cols(line2, 64, 68);

  r.inclination_deg = to_number<double>(incl, n2, "inclination");
  r.raan_deg = to_number<double>(raan, n2, "right ascension");
  const std::string_view ecc = cols(line2, 27, 33);
  if (trim(ecc).size() != ecc.size()) throw TleParseError(n2, "unparseable eccentricity field");
  static_cast<void>(to_number<int>(ecc, n2, "eccentricity"));
  r.eccentricity = to_number<double>("0." + std::string(ecc), n2, "eccentricity");
  r.arg_perigee_deg = to_number<double>(argp, n2, "argument of perigee");
  r.mean_anomaly_deg = to_number<double>(mean_anom, n2, "mean anomaly");
  r.mean_motion_rev_per_day = to_number<double>(motion, n2, "mean motion");
  r.rev_number = to_number<int>(rev, n2, "revolution number");

  check_range(r.inclination_deg, 0.0, 180.0, true, n2, "inclination");
  check_range(r.raan_deg, 0.0, 360.0, false, n2, "right ascension");
  check_range(r.arg_perigee_deg, 0.0, 360.0, false, n2, "argument of perigee");
  check_range(r.mean_anomaly_deg, 0.0, 360.0, false, n2, "mean anomaly");
  if (!(r.mean_motion_rev_per_day > 0.0)) throw TleParseError(n2, "mean motion must be positive");
  if (r.rev_number < 0) throw TleParseError(n2, "revolution number must be non-negative");

  r.style.explicit_plus = ndot[0] == '+' || nddot[0] == '+' || bstar[0] == '+';
  for (const std::string_view f : {incl, raan, argp, mean_anom, motion}) {
    if (f[0] == '0') r.style.zero_padded = true;
  }
  r.style.zero_padded_rev = rev[0] == '0' && r.rev_number != 0;

  name_line = trim(name_line);
  if (name_line.starts_with("0 ")) name_line = trim(name_line.substr(2));
  r.name = name_line.empty() ? std::to_string(r.norad_id) : std::string(name_line);
  return r;
}

TleRecord parse_tle(std::string_view block) {
  std::vector<std::string_view> lines;
  while (!block.empty()) {
    const auto nl = block.find('\n');
    const std::string_view line = block.substr(0, nl);
    if (!trim(line).empty()) lines.push_back(line);
    if (nl == std::string_view::npos) break;
    block.remove_prefix(nl + 1);
  }
  if (lines.size() == 2) return parse_tle({}, lines[0], lines[1], 1);
  if (lines.size() == 3) return parse_tle(lines[0], lines[1], lines[2], 2);
  throw TleParseError(1, "expected a two- or three-line element set, found " +
                             std::to_string(lines.size()) + " lines");
}

std::string format_tle_line1(const TleRecord& r) {
  const TleStyle& st = r.style;
  char ndot[24];
  std::snprintf(ndot, sizeof ndot, "%.8f", std::abs(r.mean_motion_dot));
  const char* ndot_digits = ndot[0] == '0' ? ndot + 1 : ndot;

  char buf[96];
  std::snprintf(buf, sizeof buf, "1 %05d%c %-8s %02d%012.8f %c%s %s %s %d %4d", r.norad_id,
                r.classification, r.intl_designator.c_str(), r.epoch_year, r.epoch_day,
                sign_char(r.mean_motion_dot < 0, st), ndot_digits,
                format_implied_exponent(r.mean_motion_ddot, st).c_str(),
                format_implied_exponent(r.b_star_field, st).c_str(), r.ephemeris_type,
                r.element_set_number);
  std::string line(buf);
  line.push_back(static_cast<char>('0' + tle_checksum(line)));
  return line;
}

std::string format_tle_line2(const TleRecord& r) {
  const bool zp = r.style.zero_padded;
  const char* angle = zp ? "%08.4f" : "%8.4f";
  auto fmt_angle = [&](double v) {
    char b[16];
    std::snprintf(b, sizeof b, angle, v);
    return std::string(b);
  };
  char motion[24];
  std::snprintf(motion, sizeof motion, zp ? "%011.8f" : "%11.8f", r.mean_motion_rev_per_day);
  char rev[16];
  std::snprintf(rev, sizeof rev, r.style.zero_padded_rev ? "%05d" : "%5d", r.rev_number);

  char buf[96];
  std::snprintf(buf, sizeof buf, "2 %05d %s %s %07lld %s %s %s%s", r.norad_id,
                fmt_angle(r.inclination_deg).c_str(), fmt_angle(r.raan_deg).c_str(),
                static_cast<long long>(std::llround(r.eccentricity * 1e7)),
                fmt_angle(r.arg_perigee_deg).c_str(), fmt_angle(r.mean_anomaly_deg).c_str(),
                motion, rev);
  std::string line(buf);
  line.push_back(static_cast<char>('0' + tle_checksum(line)));
  return line;
}

std::string format_tle(const TleRecord& record) {
  std::string out;
  if (!record.name.empty()) out += record.name + '\n';
  out += format_tle_line1(record) + '\n';
  out += format_tle_line2(record) + '\n';
  return out;
}

std::string_view to_string(OrbitRegime regime) {
  switch (regime) {
    case OrbitRegime::LEO: return "LEO";
    case OrbitRegime::MEO: return "MEO";
    case OrbitRegime::GEO: return "GEO";
    case OrbitRegime::HEO: return "HEO";
  }
  return "?";
}

std::optional<OrbitRegime> regime_from_string(std::string_view text) {
  for (const OrbitRegime r : kAllRegimes) {
    const std::string_view name = to_string(r);
    if (text.size() == name.size() &&
        std::equal(text.begin(), text.end(), name.begin(),
                   [](char a, char b) { return std::toupper(static_cast<unsigned char>(a)) == b; })) {
      return r;
    }
  }
  return std::nullopt;
}

double semi_major_axis_km(double mean_motion_rev_per_day) {
  const double n_rad_s = mean_motion_rev_per_day * kTwoPi / kSecondsPerDay;
  return std::cbrt(kMuEarth / (n_rad_s * n_rad_s));
}

OrbitRegime classify_regime(const TleRecord& record, const RegimeThresholds& t) {
  if (record.eccentricity >= t.heo_min_eccentricity) return OrbitRegime::HEO;
  const double a = semi_major_axis_km(record.mean_motion_rev_per_day);
  if (std::abs(a - t.geo_semi_major_km) <= t.geo_band_km) return OrbitRegime::GEO;
  const double apogee_alt = a * (1.0 + record.eccentricity) - kEarthRadiusKm;
  if (apogee_alt < t.leo_max_apogee_altitude_km) return OrbitRegime::LEO;
  return OrbitRegime::MEO;
}

Catalog::Catalog(std::vector<TleRecord> records, const RegimeThresholds& thresholds)
    : records_(std::move(records)) {
  regimes_.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto [it, inserted] = by_id_.emplace(records_[i].norad_id, i);
    if (!inserted) {
      throw InputError("duplicate norad id " + std::to_string(records_[i].norad_id));
    }
    const OrbitRegime regime = classify_regime(records_[i], thresholds);
    regimes_.push_back(regime);
    regime_index_[static_cast<std::size_t>(regime)].push_back(i);
  }
}

std::optional<std::size_t> Catalog::find(int norad_id) const {
  const auto it = by_id_.find(norad_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

Catalog load_catalog(std::istream& in, const CatalogOptions& options) {
  struct Line {
    int number;
    std::string text;
  };
  std::vector<Line> lines;
  {
    std::string text;
    int number = 0;
    while (std::getline(in, text)) {
      ++number;
      if (!trim(text).empty()) lines.push_back({number, std::move(text)});
    }
  }
  if (lines.empty()) throw InputError("empty input: no element sets found");

  const bool fail_fast = options.policy == ParsePolicy::FailFast;
  std::vector<TleRecord> records;
  std::unordered_map<int, std::size_t> seen;
  std::vector<Diagnostic> diagnostics;

  auto report = [&](int line, const std::string& message) {
    if (fail_fast) throw TleParseError(line, message);
    diagnostics.push_back({line, message});
  };
  auto is_data = [&](std::size_t i, char which) {
    return i < lines.size() && lines[i].text.size() >= 2 && lines[i].text[0] == which &&
           lines[i].text[1] == ' ';
  };

  std::size_t i = 0;
  while (i < lines.size()) {
    std::string_view name;
    std::size_t first_data = i;
    if (is_data(i, '2')) {
      report(lines[i].number, "line 2 without a preceding line 1");
      ++i;
      continue;
    }
    if (!is_data(i, '1')) {
      name = lines[i].text;
      first_data = i + 1;
    }
    if (!is_data(first_data, '1') || !is_data(first_data + 1, '2')) {
      report(lines[i].number, "expected element set lines starting '1 ' and '2 '");
      ++i;
      continue;
    }
    try {
      TleRecord record = parse_tle(name, lines[first_data].text, lines[first_data + 1].text,
                                   lines[first_data].number);
      // A block whose lines were not consecutive in the file still parses;
      // the line-2 number in errors is then off, which we accept.
      const auto [it, inserted] = seen.emplace(record.norad_id, records.size());
      if (inserted) {
        records.push_back(std::move(record));
      } else {
        report(lines[first_data].number,
               "duplicate norad id " + std::to_string(record.norad_id) + ", keeping last");
        records[it->second] = std::move(record);
      }
    } catch (const TleParseError& e) {
      if (fail_fast) throw;
      diagnostics.push_back({e.line(), e.message()});
    }
    i = first_data + 2;
  }

  Catalog catalog(std::move(records), options.thresholds);
  for (auto& d : diagnostics) catalog.add_diagnostic(std::move(d));
  return catalog;
}

}  // namespace sda
