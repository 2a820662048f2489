#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sda/consensus.hpp"
#include "sda/graph.hpp"
#include "sda/propagation.hpp"
#include "sda/tessellation.hpp"
#include "sda/time.hpp"
#include "sda/tle.hpp"

namespace sda {

struct ConsensusConfig {
  RoleStrategy strategy = RoleStrategy::DegreeMode;
  /// Unset: default_role_counts() of each snapshot.
  std::optional<RoleCounts> counts;
  /// Use the degree strategy when the k-core strategy has no two-tier structure.
  bool fallback_to_degree = true;
  std::string payload = "sda-observation";
  std::uint64_t key_seed = 0;
};

struct SimulationConfig {
  OrbitRegime regime = OrbitRegime::LEO;
  std::vector<double> fractions = default_fractions();
  double time_step_s = 600.0;
  double duration_s = 86400.0;
  UtcTime start_time;
  std::uint64_t rng_seed = 42;
  std::optional<ConsensusConfig> consensus;
  bool keep_geometry = false;  // retain triangulation and Voronoi per snapshot
  unsigned threads = 0;        // 0: hardware concurrency
  TessellationOptions tessellation;
  MetricsOptions metrics;

  /// 5, 15, ..., 95.
  static std::vector<double> default_fractions();
  /// Participation levels of the published summary: 10..90 for LEO, 10..70 otherwise.
  static std::vector<double> table_fractions(OrbitRegime regime);

  /// Throws PreconditionError on a fraction outside (0, 100], a non-positive
  /// step or a duration shorter than one step.
  void validate() const;
  std::size_t snapshot_count() const;
};

/// Uniform sample without replacement from the regime's bucket, of size
/// round-half-up(fraction% of the bucket) but at least 4. Returned in catalog
/// order. Samples drawn with the same seed are nested across fractions.
std::vector<int> sample_actuators(const Catalog& catalog, OrbitRegime regime, double fraction_pct,
                                  std::uint64_t rng_seed);

struct NodeRow {
  int norad_id = 0;
  std::string name;
  OrbitRegime regime = OrbitRegime::LEO;
  GeodeticPoint geodetic;
  int degree = 0;
  int eccentricity = 0;
  double closeness = 0.0;
  int coreness = 0;
};

struct EdgeRow {
  int norad_a = 0;
  int norad_b = 0;
  double great_circle_km = 0.0;
  double chord_km = 0.0;
  bool in_mst = false;
};

struct GlobalRow {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  int diameter = 0;
  int radius = 0;
  double average_path_length = 0.0;
  double degree_mean = 0.0;
  double degree_variance = 0.0;
  double mst_total_km = 0.0;
};

struct SnapshotGeometry {
  SphericalTriangulation triangulation;
  SphericalVoronoi voronoi;
};

/// Everything recorded for one (fraction, timestamp) snapshot.
struct TimeSeriesRecord {
  UtcTime timestamp;
  double fraction_pct = 0.0;
  bool valid = true;
  std::string error;  // set when !valid

  std::vector<NodeRow> nodes;  // ordered by norad id
  std::vector<EdgeRow> edges;  // ordered by (norad_a, norad_b)
  std::vector<Alias> aliases;
  GlobalRow global;
  MetricsReport metrics;
  std::optional<nlohmann::json> consensus;
  std::shared_ptr<const SnapshotGeometry> geometry;
};

struct SummaryEntry {
  OrbitRegime regime = OrbitRegime::LEO;
  double fraction_pct = 0.0;
  std::size_t snapshots = 0;
  SummaryRow row;
};

struct SimulationResult {
  std::vector<TimeSeriesRecord> records;  // by fraction, then timestamp
  std::vector<SummaryEntry> summary;      // one per fraction with a valid snapshot
  std::vector<std::string> warnings;
};

using ProgressCallback = std::function<void(std::size_t done, std::size_t total)>;

/// Builds one snapshot: propagate, project, tessellate, measure. Errors are
/// recorded in the returned record (valid = false) rather than thrown.
TimeSeriesRecord build_snapshot(const Catalog& catalog, std::span<const int> norad_ids, UtcTime t,
                                double fraction_pct, const SimulationConfig& config);

/// Graph over the record's node rows, or over the edge endpoints when the
/// record has no node rows. Throws PreconditionError for an edge naming an
/// unknown node.
ActuatorGraph snapshot_graph(const TimeSeriesRecord& record);

/// Refills the metric columns, MST flags and global row of a record from its
/// node and edge rows. Throws PreconditionError for a disconnected graph.
void recompute_metrics(TimeSeriesRecord& record, const MetricsOptions& options = {});

/// Every fraction, every time step, then the per-fraction summary.
SimulationResult run_simulation(const SimulationConfig& config, const Catalog& catalog,
                                const ProgressCallback& progress = {});

/// Summary rows from global rows alone (diameter stands in for the largest
/// node eccentricity), grouped by fraction in ascending order.
std::vector<SummaryEntry> summarize_globals(OrbitRegime regime,
                                            std::span<const TimeSeriesRecord> records);

}  // namespace sda
