#include "sda/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <system_error>
#include <tuple>

#include "sda/error.hpp"
#include "sda/geojson.hpp"

namespace sda {

namespace csv {

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back() += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw InputError("unterminated quoted field");
  return fields;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

std::string fraction(double pct) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", pct);
  return buf;
}

}  // namespace csv

namespace {

std::string prefix(const TimeSeriesRecord& r) {
  return to_iso8601(r.timestamp) + ',' + csv::fraction(r.fraction_pct) + ',';
}

std::string closeness_text(double c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", c);
  return buf;
}

class RowReader {
 public:
  RowReader(std::istream& in, std::string_view header, std::size_t columns)
      : in_(in), columns_(columns) {
    std::string line;
    if (!std::getline(in_, line)) throw InputError("line:1: missing header");
    strip_cr(line);
    if (line != header) {
      throw InputError("line:1: unexpected header, expected \"" + std::string(header) + "\"");
    }
    line_ = 1;
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      strip_cr(line);
      if (line.empty()) continue;
      try {
        fields = csv::split(line);
      } catch (const InputError& e) {
        fail(e.what());
      }
      if (fields.size() != columns_) {
        fail("expected " + std::to_string(columns_) + " fields, found " +
             std::to_string(fields.size()));
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw InputError("line:" + std::to_string(line_) + ": " + message);
  }

  template <typename T>
  T number(const std::string& text, std::string_view column) const {
    T value{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
      fail("bad " + std::string(column) + " \"" + text + "\"");
    }
    return value;
  }

  UtcTime time(const std::string& text) const {
    try {
      return parse_iso8601(text);
    } catch (const InputError& e) {
      fail(e.what());
    }
  }

 private:
  static void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
  }

  std::istream& in_;
  std::size_t columns_;
  int line_ = 0;
};

using RecordKey = std::pair<double, std::int64_t>;  // (fraction, ms)

TimeSeriesRecord& slot(std::map<RecordKey, TimeSeriesRecord>& records, UtcTime t, double fraction) {
  TimeSeriesRecord& r = records[{fraction, t.ms}];
  r.timestamp = t;
  r.fraction_pct = fraction;
  return r;
}

std::vector<TimeSeriesRecord> flatten(std::map<RecordKey, TimeSeriesRecord>& records) {
  std::vector<TimeSeriesRecord> out;
  out.reserve(records.size());
  for (auto& [key, r] : records) out.push_back(std::move(r));
  return out;
}

std::string compact_time(UtcTime t) {
  std::string iso = to_iso8601(t);  // YYYY-MM-DDTHH:MM:SS.mmmZ
  iso.erase(19, 4);
  std::erase(iso, '-');
  std::erase(iso, ':');
  return iso;
}

}  // namespace

void write_nodes_csv(std::ostream& out, std::span<const TimeSeriesRecord> records) {
  out << kNodesHeader << '\n';
  for (const auto& r : records) {
    if (!r.valid) continue;
    const std::string p = prefix(r);
    for (const auto& n : r.nodes) {
      out << p << n.norad_id << ',' << csv::escape(n.name) << ',' << to_string(n.regime) << ','
          << csv::fixed(n.geodetic.latitude_deg, 6) << ',' << csv::fixed(n.geodetic.longitude_deg, 6)
          << ',' << csv::fixed(n.geodetic.altitude_km, 3) << ',' << n.degree << ','
          << n.eccentricity << ',' << closeness_text(n.closeness) << ',' << n.coreness << '\n';
    }
  }
}

void write_edges_csv(std::ostream& out, std::span<const TimeSeriesRecord> records) {
  out << kEdgesHeader << '\n';
  for (const auto& r : records) {
    if (!r.valid) continue;
    const std::string p = prefix(r);
    for (const auto& e : r.edges) {
      out << p << e.norad_a << ',' << e.norad_b << ',' << csv::fixed(e.great_circle_km, 6) << ','
          << csv::fixed(e.chord_km, 6) << ',' << (e.in_mst ? 1 : 0) << '\n';
    }
  }
}

void write_globals_csv(std::ostream& out, std::span<const TimeSeriesRecord> records) {
  out << kGlobalsHeader << '\n';
  for (const auto& r : records) {
    if (!r.valid) continue;
    const GlobalRow& g = r.global;
    out << prefix(r) << g.node_count << ',' << g.edge_count << ',' << g.diameter << ',' << g.radius
        << ',' << csv::fixed(g.average_path_length, 6) << ',' << csv::fixed(g.degree_mean, 6) << ','
        << csv::fixed(g.degree_variance, 6) << ',' << csv::fixed(g.mst_total_km, 3) << '\n';
  }
}

void write_aliases_csv(std::ostream& out, std::span<const TimeSeriesRecord> records) {
  out << kAliasesHeader << '\n';
  for (const auto& r : records) {
    if (!r.valid) continue;
    const std::string p = prefix(r);
    for (const auto& a : r.aliases) out << p << a.representative_id << ',' << a.alias_id << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryEntry> summary) {
  out << kSummaryHeader << '\n';
  for (const auto& s : summary) {
    out << to_string(s.regime) << ',' << csv::fraction(s.fraction_pct) << ','
        << csv::fixed(s.row.mean_eccentricity, 3) << ',' << s.row.max_eccentricity << ','
        << csv::fixed(s.row.mean_diameter, 3) << ',' << csv::fixed(s.row.mean_radius, 3) << ','
        << s.row.min_radius << '\n';
  }
}

void write_consensus_jsonl(std::ostream& out, std::span<const TimeSeriesRecord> records) {
  for (const auto& r : records) {
    if (!r.valid || !r.consensus) continue;
    nlohmann::json line = *r.consensus;
    line["timestamp"] = to_iso8601(r.timestamp);
    line["fraction_pct"] = r.fraction_pct;
    out << line.dump() << '\n';
  }
}

namespace {

void read_edges_into(std::istream& edges, std::map<RecordKey, TimeSeriesRecord>& records,
                     bool create) {
  std::vector<std::string> f;
  RowReader rows(edges, kEdgesHeader, 7);
  while (rows.next(f)) {
    const UtcTime t = rows.time(f[0]);
    const double fraction = rows.number<double>(f[1], "fraction_pct");
    auto it = records.find({fraction, t.ms});
    if (it == records.end()) {
      if (!create) rows.fail("edge for a snapshot without nodes");
      it = records.emplace(RecordKey{fraction, t.ms}, TimeSeriesRecord{}).first;
      it->second.timestamp = t;
      it->second.fraction_pct = fraction;
    }
    EdgeRow e;
    e.norad_a = rows.number<int>(f[2], "norad_a");
    e.norad_b = rows.number<int>(f[3], "norad_b");
    e.great_circle_km = rows.number<double>(f[4], "great_circle_km");
    e.chord_km = rows.number<double>(f[5], "chord_km");
    const int in_mst = rows.number<int>(f[6], "in_mst");
    if (in_mst != 0 && in_mst != 1) rows.fail("in_mst must be 0 or 1");
    e.in_mst = in_mst == 1;
    it->second.edges.push_back(e);
  }
}

}  // namespace

std::vector<TimeSeriesRecord> read_snapshots(std::istream& nodes, std::istream& edges) {
  std::map<RecordKey, TimeSeriesRecord> records;
  std::vector<std::string> f;

  RowReader node_rows(nodes, kNodesHeader, 12);
  while (node_rows.next(f)) {
    TimeSeriesRecord& r =
        slot(records, node_rows.time(f[0]), node_rows.number<double>(f[1], "fraction_pct"));
    NodeRow n;
    n.norad_id = node_rows.number<int>(f[2], "norad_id");
    n.name = f[3];
    const auto regime = regime_from_string(f[4]);
    if (!regime) node_rows.fail("unknown regime \"" + f[4] + "\"");
    n.regime = *regime;
    n.geodetic.latitude_deg = node_rows.number<double>(f[5], "latitude_deg");
    n.geodetic.longitude_deg = node_rows.number<double>(f[6], "longitude_deg");
    n.geodetic.altitude_km = node_rows.number<double>(f[7], "altitude_km");
    n.degree = node_rows.number<int>(f[8], "degree");
    n.eccentricity = node_rows.number<int>(f[9], "eccentricity");
    n.closeness = node_rows.number<double>(f[10], "closeness");
    n.coreness = node_rows.number<int>(f[11], "coreness");
    r.nodes.push_back(std::move(n));
  }
  read_edges_into(edges, records, false);
  return flatten(records);
}

std::vector<TimeSeriesRecord> read_edges_csv(std::istream& edges) {
  std::map<RecordKey, TimeSeriesRecord> records;
  read_edges_into(edges, records, true);
  return flatten(records);
}

std::vector<TimeSeriesRecord> read_globals_csv(std::istream& in) {
  std::map<RecordKey, TimeSeriesRecord> records;
  std::vector<std::string> f;
  RowReader rows(in, kGlobalsHeader, 10);
  while (rows.next(f)) {
    TimeSeriesRecord& r = slot(records, rows.time(f[0]), rows.number<double>(f[1], "fraction_pct"));
    GlobalRow& g = r.global;
    g.node_count = rows.number<std::size_t>(f[2], "node_count");
    g.edge_count = rows.number<std::size_t>(f[3], "edge_count");
    g.diameter = rows.number<int>(f[4], "diameter");
    g.radius = rows.number<int>(f[5], "radius");
    g.average_path_length = rows.number<double>(f[6], "avg_path_length");
    g.degree_mean = rows.number<double>(f[7], "degree_mean");
    g.degree_variance = rows.number<double>(f[8], "degree_variance");
    g.mst_total_km = rows.number<double>(f[9], "mst_total_km");
  }
  return flatten(records);
}

std::vector<SummaryEntry> read_summary_csv(std::istream& in) {
  std::vector<SummaryEntry> out;
  std::vector<std::string> f;
  RowReader rows(in, kSummaryHeader, 7);
  while (rows.next(f)) {
    SummaryEntry s;
    const auto regime = regime_from_string(f[0]);
    if (!regime) rows.fail("unknown regime \"" + f[0] + "\"");
    s.regime = *regime;
    s.fraction_pct = rows.number<double>(f[1], "fraction_pct");
    s.row.mean_eccentricity = rows.number<double>(f[2], "mean_ecc");
    s.row.max_eccentricity = rows.number<int>(f[3], "max_ecc");
    s.row.mean_diameter = rows.number<double>(f[4], "mean_diameter");
    s.row.mean_radius = rows.number<double>(f[5], "mean_radius");
    s.row.min_radius = rows.number<int>(f[6], "min_radius");
    out.push_back(s);
  }
  return out;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  return in;
}

std::vector<std::filesystem::path> export_run(const SimulationResult& result,
                                              const std::filesystem::path& dir,
                                              const ExportOptions& options) {
  if (result.records.empty()) throw PreconditionError("no records to export");
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::string& name, auto&& writer) {
    const auto path = dir / name;
    std::ofstream out = open_output(path);
    writer(out);
    out.flush();
    if (!out) throw InputError("failed writing " + path.string());
    written.push_back(path);
  };
  const std::span<const TimeSeriesRecord> records(result.records);
  emit("nodes.csv", [&](std::ostream& o) { write_nodes_csv(o, records); });
  emit("edges.csv", [&](std::ostream& o) { write_edges_csv(o, records); });
  emit("globals.csv", [&](std::ostream& o) { write_globals_csv(o, records); });
  emit("summary.csv", [&](std::ostream& o) { write_summary_csv(o, result.summary); });

  const bool merged = std::any_of(records.begin(), records.end(),
                                  [](const auto& r) { return r.valid && !r.aliases.empty(); });
  if (merged) emit("aliases.csv", [&](std::ostream& o) { write_aliases_csv(o, records); });

  const bool consensus = std::any_of(records.begin(), records.end(),
                                     [](const auto& r) { return r.valid && r.consensus; });
  if (consensus) emit("consensus.jsonl", [&](std::ostream& o) { write_consensus_jsonl(o, records); });

  if (options.geojson) {
    for (const auto& r : records) {
      if (!r.valid || !r.geometry) continue;
      const auto path = dir / "geojson" /
                        (csv::fraction(r.fraction_pct) + "pct_" + compact_time(r.timestamp) + ".geojson");
      std::error_code ec;
      std::filesystem::create_directories(path.parent_path(), ec);
      write_geojson(path, r.geometry->triangulation, r.geometry->voronoi);
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace sda
