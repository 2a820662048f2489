#include "sda/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <thread>
#include <unordered_map>

#include "sda/error.hpp"

namespace sda {

namespace {

std::string percent(double f) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g%%", f);
  return buf;
}

}  // namespace

std::vector<double> SimulationConfig::default_fractions() {
  std::vector<double> out;
  for (int f = 5; f <= 95; f += 10) out.push_back(f);
  return out;
}

std::vector<double> SimulationConfig::table_fractions(OrbitRegime regime) {
  if (regime == OrbitRegime::LEO) return {10, 30, 50, 70, 90};
  return {10, 30, 50, 70};
}

void SimulationConfig::validate() const {
  if (fractions.empty()) throw PreconditionError("no participation fractions given");
  for (double f : fractions) {
    if (!(f > 0.0 && f <= 100.0)) {
      throw PreconditionError("fraction " + percent(f) + " outside (0, 100]");
    }
  }
  if (!(time_step_s > 0.0)) throw PreconditionError("time step must be positive");
  if (!(duration_s >= time_step_s)) throw PreconditionError("duration shorter than one time step");
}

std::size_t SimulationConfig::snapshot_count() const {
  // Timestamps k * step strictly inside [0, duration).
  const double n = std::ceil(duration_s / time_step_s - 1e-9);
  return static_cast<std::size_t>(std::max(1.0, n));
}

std::vector<int> sample_actuators(const Catalog& catalog, OrbitRegime regime, double fraction_pct,
                                  std::uint64_t rng_seed) {
  if (!(fraction_pct > 0.0 && fraction_pct <= 100.0)) {
    throw PreconditionError("fraction " + percent(fraction_pct) + " outside (0, 100]");
  }
  const auto& bucket = catalog.bucket(regime);
  if (bucket.size() < 4) {
    throw PreconditionError(std::string(to_string(regime)) + " bucket holds " +
                            std::to_string(bucket.size()) + " actuators, at least 4 are needed");
  }
  const double exact = fraction_pct * static_cast<double>(bucket.size()) / 100.0;
  std::size_t k = static_cast<std::size_t>(std::floor(exact + 0.5));
  k = std::clamp<std::size_t>(k, 4, bucket.size());

  // Partial Fisher-Yates: the first k positions of one seeded permutation.
  std::vector<std::size_t> pool = bucket;
  std::mt19937_64 rng(rng_seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  std::vector<int> ids;
  ids.reserve(k);
  for (std::size_t index : pool) ids.push_back(catalog.records()[index].norad_id);
  return ids;
}

namespace {

void fill_from_metrics(TimeSeriesRecord& record, const ActuatorGraph& graph,
                       const MetricsReport& report) {
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    NodeRow& row = record.nodes[i];
    row.degree = report.degree[i];
    row.eccentricity = report.eccentricity[i];
    row.closeness = report.closeness[i];
    row.coreness = report.coreness[i];
  }
  for (auto& e : record.edges) e.in_mst = false;
  for (std::size_t index : report.mst.edges) record.edges[index].in_mst = true;

  GlobalRow& g = record.global;
  g.node_count = report.node_count;
  g.edge_count = report.edge_count;
  g.diameter = report.diameter;
  g.radius = report.radius;
  g.average_path_length = report.average_path_length;
  g.degree_mean = report.degree_mean;
  g.degree_variance = report.degree_variance;
  g.mst_total_km = report.mst.total_chord_km;
  record.metrics = report;

  if (g.radius > g.diameter || g.diameter > 2 * g.radius) {
    throw InvariantError("radius " + std::to_string(g.radius) + " and diameter " +
                         std::to_string(g.diameter) + " violate R <= D <= 2R");
  }
}

nlohmann::json run_consensus(const ConsensusConfig& cc, const ActuatorGraph& graph, UtcTime t) {
  const RoleCounts counts = cc.counts.value_or(default_role_counts(graph.node_count()));
  RoleAssignment assignment;
  std::string fallback;
  if (cc.strategy == RoleStrategy::KCoreShell) {
    try {
      assignment = assign_roles_kcore(graph, t);
    } catch (const PreconditionError& e) {
      if (!cc.fallback_to_degree) throw;
      fallback = e.what();
      assignment = assign_roles_degree(graph, counts, t);
    }
  } else {
    assignment = assign_roles_degree(graph, counts, t);
  }
  const ConsensusRound round = run_round(to_bytes(cc.payload), assignment, graph, {}, cc.key_seed);
  nlohmann::json record = transcript_record(round);
  if (!fallback.empty()) record["fallback"] = fallback;
  return record;
}

}  // namespace

TimeSeriesRecord build_snapshot(const Catalog& catalog, std::span<const int> norad_ids, UtcTime t,
                                double fraction_pct, const SimulationConfig& config) {
  TimeSeriesRecord record;
  record.timestamp = t;
  record.fraction_pct = fraction_pct;
  try {
    const std::vector<ActuatorState> states = propagate_catalog(catalog, t, norad_ids);
    std::vector<UnitSpherePoint> points;
    points.reserve(states.size());
    std::unordered_map<int, const ActuatorState*> by_id;
    for (const auto& s : states) {
      points.push_back(project_to_unit_sphere(s.geodetic, s.norad_id));
      by_id.emplace(s.norad_id, &s);
    }
    SphericalTriangulation tri = delaunay_on_sphere(points, config.tessellation);
    const ActuatorGraph graph = ActuatorGraph::from_triangulation(tri);

    record.nodes.reserve(graph.node_count());
    for (int id : graph.node_ids()) {
      const ActuatorState& s = *by_id.at(id);
      NodeRow row;
      row.norad_id = id;
      row.name = s.name;
      row.regime = s.regime;
      row.geodetic = s.geodetic;
      record.nodes.push_back(std::move(row));
    }
    const auto& ids = graph.node_ids();
    record.edges.reserve(graph.edge_count());
    for (const GraphEdge& e : graph.edges()) {
      record.edges.push_back(EdgeRow{ids[e.a], ids[e.b], e.great_circle_km, e.chord_km, false});
    }
    record.aliases = tri.aliases;
    fill_from_metrics(record, graph, compute_metrics(graph, config.metrics));

    if (config.consensus) record.consensus = run_consensus(*config.consensus, graph, t);
    if (config.keep_geometry) {
      auto geometry = std::make_shared<SnapshotGeometry>();
      geometry->voronoi = voronoi_dual(tri);
      geometry->triangulation = std::move(tri);
      record.geometry = std::move(geometry);
    }
  } catch (const InvariantError&) {
    throw;
  } catch (const Error& e) {
    record.valid = false;
    record.error = e.what();
    record.nodes.clear();
    record.edges.clear();
    record.aliases.clear();
    record.consensus.reset();
    record.geometry.reset();
  }
  return record;
}

ActuatorGraph snapshot_graph(const TimeSeriesRecord& record) {
  std::vector<int> ids;
  if (record.nodes.empty()) {
    for (const auto& e : record.edges) {
      ids.push_back(e.norad_a);
      ids.push_back(e.norad_b);
    }
  } else {
    for (const auto& n : record.nodes) ids.push_back(n.norad_id);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::unordered_map<int, int> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<int>(i));

  std::vector<GraphEdge> edges;
  edges.reserve(record.edges.size());
  for (const auto& e : record.edges) {
    const auto a = index.find(e.norad_a);
    const auto b = index.find(e.norad_b);
    if (a == index.end() || b == index.end()) {
      throw PreconditionError("edge " + std::to_string(e.norad_a) + "-" +
                              std::to_string(e.norad_b) + " names an unknown node");
    }
    edges.push_back(GraphEdge{std::min(a->second, b->second), std::max(a->second, b->second),
                              e.great_circle_km, e.chord_km});
  }
  std::sort(edges.begin(), edges.end(), [](const GraphEdge& x, const GraphEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return ActuatorGraph(std::move(ids), std::move(edges));
}

void recompute_metrics(TimeSeriesRecord& record, const MetricsOptions& options) {
  if (record.nodes.empty()) throw PreconditionError("record has no node rows");
  std::sort(record.nodes.begin(), record.nodes.end(),
            [](const NodeRow& x, const NodeRow& y) { return x.norad_id < y.norad_id; });
  for (auto& e : record.edges) {
    if (e.norad_a > e.norad_b) std::swap(e.norad_a, e.norad_b);
  }
  std::sort(record.edges.begin(), record.edges.end(), [](const EdgeRow& x, const EdgeRow& y) {
    return std::tie(x.norad_a, x.norad_b) < std::tie(y.norad_a, y.norad_b);
  });
  const ActuatorGraph graph = snapshot_graph(record);
  fill_from_metrics(record, graph, compute_metrics(graph, options));
}

SimulationResult run_simulation(const SimulationConfig& config, const Catalog& catalog,
                                const ProgressCallback& progress) {
  config.validate();
  std::vector<double> fractions = config.fractions;
  std::sort(fractions.begin(), fractions.end());
  fractions.erase(std::unique(fractions.begin(), fractions.end()), fractions.end());

  SimulationResult result;
  std::vector<std::vector<int>> samples;
  samples.reserve(fractions.size());
  for (double f : fractions) {
    samples.push_back(sample_actuators(catalog, config.regime, f, config.rng_seed));
  }

  const std::size_t steps = config.snapshot_count();
  const UtcTime end = config.start_time.plus_seconds(config.duration_s);
  for (std::size_t index : catalog.bucket(config.regime)) {
    const TleRecord& r = catalog.records()[index];
    if (is_stale(r, config.start_time) || is_stale(r, end)) {
      result.warnings.push_back("norad " + std::to_string(r.norad_id) +
                                ": element set epoch more than 30 days from the simulated window");
    }
  }

  const std::size_t total = fractions.size() * steps;
  result.records.resize(total);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;
  auto worker = [&] {
    for (std::size_t job = next++; job < total; job = next++) {
      try {
        const std::size_t fi = job / steps;
        const std::size_t step = job % steps;
        const UtcTime t =
            config.start_time.plus_seconds(static_cast<double>(step) * config.time_step_s);
        result.records[job] = build_snapshot(catalog, samples[fi], t, fractions[fi], config);
      } catch (...) {
        std::lock_guard lock(progress_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
        return;
      }
      const std::size_t finished = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(finished, total);
      }
    }
  };
  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1, static_cast<unsigned>(std::max<std::size_t>(total, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& r : result.records) {
    if (!r.valid) {
      result.warnings.push_back(to_iso8601(r.timestamp) + " at " + percent(r.fraction_pct) + ": " +
                                r.error);
    }
  }

  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    std::vector<MetricsReport> reports;
    for (std::size_t step = 0; step < steps; ++step) {
      const auto& r = result.records[fi * steps + step];
      if (r.valid) reports.push_back(r.metrics);
    }
    if (reports.empty()) continue;
    result.summary.push_back(
        SummaryEntry{config.regime, fractions[fi], reports.size(), summarize_run(reports)});
  }
  return result;
}

std::vector<SummaryEntry> summarize_globals(OrbitRegime regime,
                                            std::span<const TimeSeriesRecord> records) {
  std::map<double, std::vector<MetricsReport>> groups;
  for (const auto& r : records) {
    if (!r.valid) continue;
    MetricsReport m;
    m.diameter = r.global.diameter;
    m.radius = r.global.radius;
    groups[r.fraction_pct].push_back(std::move(m));
  }
  std::vector<SummaryEntry> out;
  for (const auto& [fraction, reports] : groups) {
    out.push_back(SummaryEntry{regime, fraction, reports.size(), summarize_run(reports)});
  }
  return out;
}

}  // namespace sda
