#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sda/error.hpp"

namespace sda {

/// Decimal-point-assumed field with a one-digit power of ten, e.g. "+27923-4"
/// for 0.27923e-4. Kept in its encoded parts so records re-serialize exactly.
struct ImpliedExponent {
  std::int32_t mantissa = 0;  // signed, five digits
  std::int8_t exponent = 0;   // signed, one digit
  bool negative_zero_exponent = true;  // "00000-0" vs "00000+0"; true unless exponent is 0

  double value() const;
  bool operator==(const ImpliedExponent&) const = default;
};

/// Cosmetic conventions observed in the source text (they differ between
/// catalog providers). Parsing ignores them; formatting honors them.
struct TleStyle {
  bool explicit_plus = false;     // '+' instead of ' ' on positive signed fields
  bool zero_padded = false;       // "098.5303" rather than " 98.5303"
  bool zero_padded_rev = false;   // revolution number "00123" rather than "  123"
  bool operator==(const TleStyle&) const = default;
};

struct TleRecord {
  std::string name;
  int norad_id = 0;
  char classification = 'U';
  std::string intl_designator;  // trimmed, up to 8 characters
  int epoch_year = 0;           // two-digit, see full_epoch_year()
  double epoch_day = 1.0;       // fractional day of year, 1-based
  double mean_motion_dot = 0.0; // first derivative / 2, rev/day^2
  ImpliedExponent mean_motion_ddot;
  ImpliedExponent b_star_field;  // inverse Earth radii
  int ephemeris_type = 0;
  int element_set_number = 0;

  double inclination_deg = 0.0;
  double raan_deg = 0.0;
  double eccentricity = 0.0;
  double arg_perigee_deg = 0.0;
  double mean_anomaly_deg = 0.0;
  double mean_motion_rev_per_day = 0.0;
  int rev_number = 0;

  TleStyle style;

  double b_star() const { return b_star_field.value(); }
  /// Two-digit year with the 57 pivot: 57..99 -> 1957..1999, 00..56 -> 2000..2056.
  int full_epoch_year() const;

  bool operator==(const TleRecord&) const = default;
};

/// Parse failure tied to a physical line. what() is `line:<n>: <message>`.
class TleParseError : public InputError {
 public:
  TleParseError(int line, const std::string& message);
  int line() const noexcept { return line_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  std::string message_;
};

/// Modulo-10 checksum over the first 68 columns: digits count their value,
/// '-' counts 1, everything else 0.
int tle_checksum(std::string_view line);

/// Parses one element set. `name_line` may be empty (two-line format) and may
/// carry the "0 " prefix. Errors on the data lines report `line1_number` and
/// `line1_number + 1`.
TleRecord parse_tle(std::string_view name_line, std::string_view line1,
                    std::string_view line2, int line1_number = 2);

/// Convenience for a newline-separated two- or three-line block.
TleRecord parse_tle(std::string_view block);

std::string format_tle_line1(const TleRecord& record);
std::string format_tle_line2(const TleRecord& record);
/// Name line (if the name is non-empty) followed by both data lines, each
/// newline-terminated.
std::string format_tle(const TleRecord& record);

enum class OrbitRegime { LEO = 0, MEO = 1, GEO = 2, HEO = 3 };

inline constexpr std::array<OrbitRegime, 4> kAllRegimes{OrbitRegime::LEO, OrbitRegime::MEO,
                                                        OrbitRegime::GEO, OrbitRegime::HEO};

std::string_view to_string(OrbitRegime regime);
std::optional<OrbitRegime> regime_from_string(std::string_view text);

struct RegimeThresholds {
  double heo_min_eccentricity = 0.25;
  double geo_semi_major_km = 42164.0;
  double geo_band_km = 200.0;
  double leo_max_apogee_altitude_km = 2000.0;
};

/// Kepler's third law from the mean motion.
double semi_major_axis_km(double mean_motion_rev_per_day);

OrbitRegime classify_regime(const TleRecord& record, const RegimeThresholds& thresholds = {});

enum class ParsePolicy { FailFast, SkipAndReport };

struct Diagnostic {
  int line = 0;
  std::string message;
};

struct CatalogOptions {
  ParsePolicy policy = ParsePolicy::FailFast;
  RegimeThresholds thresholds;
};

/// Element sets grouped by orbital regime. norad ids are unique.
class Catalog {
 public:
  Catalog() = default;
  Catalog(std::vector<TleRecord> records, const RegimeThresholds& thresholds = {});

  const std::vector<TleRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  /// Record indices in catalog order.
  const std::vector<std::size_t>& bucket(OrbitRegime regime) const {
    return regime_index_[static_cast<std::size_t>(regime)];
  }
  OrbitRegime regime_of(std::size_t index) const { return regimes_[index]; }

  std::optional<std::size_t> find(int norad_id) const;

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }
  void add_diagnostic(Diagnostic d) { diagnostics_.push_back(std::move(d)); }

 private:
  std::vector<TleRecord> records_;
  std::vector<OrbitRegime> regimes_;
  std::array<std::vector<std::size_t>, 4> regime_index_;
  std::unordered_map<int, std::size_t> by_id_;
  std::vector<Diagnostic> diagnostics_;
};

/// Reads concatenated two- or three-line element sets. Throws InputError on
/// empty input; under FailFast the first bad block (or duplicate id) throws a
/// TleParseError, under SkipAndReport it is recorded in diagnostics() and
/// duplicates keep the last occurrence.
Catalog load_catalog(std::istream& in, const CatalogOptions& options = {});

}  // namespace sda
