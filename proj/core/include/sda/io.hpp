#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sda/simulation.hpp"

namespace sda {

inline constexpr std::string_view kNodesHeader =
    "timestamp,fraction_pct,norad_id,name,regime,latitude_deg,longitude_deg,altitude_km,degree,"
    "eccentricity,closeness,coreness";
inline constexpr std::string_view kGlobalsHeader =
    "timestamp,fraction_pct,node_count,edge_count,diameter,radius,avg_path_length,degree_mean,"
    "degree_variance,mst_total_km";
inline constexpr std::string_view kEdgesHeader =
    "timestamp,fraction_pct,norad_a,norad_b,great_circle_km,chord_km,in_mst";
inline constexpr std::string_view kSummaryHeader =
    "regime,fraction_pct,mean_ecc,max_ecc,mean_diameter,mean_radius,min_radius";
inline constexpr std::string_view kAliasesHeader =
    "timestamp,fraction_pct,representative_id,alias_id";

namespace csv {

/// Quotes a field when it holds a comma, quote or line break.
std::string escape(std::string_view field);

/// Splits one record, honouring double-quoted fields. Throws InputError on an
/// unterminated quote.
std::vector<std::string> split(std::string_view line);

/// printf-style fixed formatting, e.g. fixed(1.5, 3) == "1.500".
std::string fixed(double value, int decimals);

/// Shortest form that reads back as the same fraction: 5, 12.5, 33.3333.
std::string fraction(double pct);

}  // namespace csv

// Writers emit the header and rows of valid records only, in record order.
void write_nodes_csv(std::ostream& out, std::span<const TimeSeriesRecord> records);
void write_edges_csv(std::ostream& out, std::span<const TimeSeriesRecord> records);
void write_globals_csv(std::ostream& out, std::span<const TimeSeriesRecord> records);
void write_aliases_csv(std::ostream& out, std::span<const TimeSeriesRecord> records);
void write_summary_csv(std::ostream& out, std::span<const SummaryEntry> summary);
/// One JSON object per line for records that ran a consensus round.
void write_consensus_jsonl(std::ostream& out, std::span<const TimeSeriesRecord> records);

// Readers check the header byte for byte and report errors as "line:<n>: ...".
// Records come back ordered by (fraction, timestamp).

/// Node and edge rows grouped into records; metric columns are read as written.
std::vector<TimeSeriesRecord> read_snapshots(std::istream& nodes, std::istream& edges);
/// Records carrying edge rows only.
std::vector<TimeSeriesRecord> read_edges_csv(std::istream& edges);
/// Records carrying only their global row.
std::vector<TimeSeriesRecord> read_globals_csv(std::istream& in);
std::vector<SummaryEntry> read_summary_csv(std::istream& in);

struct ExportOptions {
  bool geojson = false;  // needs records built with keep_geometry
};

/// Writes nodes.csv, edges.csv, globals.csv and summary.csv into `dir`
/// (created if missing), plus aliases.csv when seeds were merged,
/// consensus.jsonl when rounds ran and geojson/ when requested. Returns the
/// paths written. Throws PreconditionError for an empty record list and
/// InputError when a file cannot be written.
std::vector<std::filesystem::path> export_run(const SimulationResult& result,
                                              const std::filesystem::path& dir,
                                              const ExportOptions& options = {});

/// Opens a file for writing, creating parent directories. Throws InputError.
std::ofstream open_output(const std::filesystem::path& path);
/// Opens a file for reading. Throws InputError.
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace sda
