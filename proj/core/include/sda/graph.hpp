#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "sda/tessellation.hpp"

namespace sda {

/// Undirected edge between node indices a < b.
struct GraphEdge {
  int a = 0;
  int b = 0;
  double great_circle_km = 1.0;
  double chord_km = 1.0;
};

/// Candidate-link graph over actuators. Nodes are addressed by index; each
/// index carries the actuator id it stands for.
class ActuatorGraph {
 public:
  ActuatorGraph() = default;
  /// Throws PreconditionError on duplicate ids, self-loops, repeated edges or
  /// out-of-range endpoints.
  ActuatorGraph(std::vector<int> node_ids, std::vector<GraphEdge> edges);

  /// Nodes ordered by actuator id, edges weighted by the great-circle and
  /// chord distances between zenith points on a sphere of Earth radius.
  static ActuatorGraph from_triangulation(const SphericalTriangulation& triangulation);

  /// Unit-weight graph on nodes 0..n-1, mainly for tests and tooling.
  static ActuatorGraph from_pairs(int node_count, std::span<const std::pair<int, int>> pairs);

  std::size_t node_count() const noexcept { return node_ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<int>& node_ids() const noexcept { return node_ids_; }
  const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
  const std::vector<int>& neighbors(std::size_t node) const { return adjacency_[node]; }
  std::size_t degree(std::size_t node) const { return adjacency_[node].size(); }

  /// Connected components as sorted node-index lists, ordered by first member.
  std::vector<std::vector<int>> components() const;

 private:
  std::vector<int> node_ids_;
  std::vector<GraphEdge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// All-pairs hop counts, row-major.
class HopMatrix {
 public:
  HopMatrix() = default;
  explicit HopMatrix(std::size_t n) : n_(n), hops_(n * n, 0) {}
  std::size_t size() const noexcept { return n_; }
  int operator()(std::size_t i, std::size_t j) const { return hops_[i * n_ + j]; }
  int& at(std::size_t i, std::size_t j) { return hops_[i * n_ + j]; }
  bool operator==(const HopMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<int> hops_;
};

/// Breadth-first search from every node. Throws PreconditionError naming the
/// components when the graph is disconnected.
HopMatrix hopcounts(const ActuatorGraph& graph);

enum class ClosenessMode {
  Unnormalized,  // 1 / sum of hops
  Normalized,    // (n - 1) / sum of hops
};

/// Throws PreconditionError for a single-node graph.
double closeness(const HopMatrix& hops, std::size_t node,
                 ClosenessMode mode = ClosenessMode::Unnormalized);
int eccentricity(const HopMatrix& hops, std::size_t node);
int diameter(const HopMatrix& hops);
int radius(const HopMatrix& hops);
/// Mean hop count over unordered pairs. Throws PreconditionError for n < 2.
double average_path_length(const HopMatrix& hops);

struct DegreeStats {
  std::vector<int> degrees;
  double mean = 0.0;
  double variance = 0.0;              // population variance
  std::map<int, double> distribution;  // degree -> fraction of nodes
};

DegreeStats degree_stats(const ActuatorGraph& graph);

/// Coreness of every node by minimum-degree peeling.
std::vector<int> kcore_decomposition(const ActuatorGraph& graph);

enum class EdgeWeight { Chord, GreatCircle };

struct SpanningTree {
  std::vector<std::size_t> edges;  // indices into graph.edges(), ascending
  double total_chord_km = 0.0;
  double total_great_circle_km = 0.0;
};

/// Kruskal over the graph's edges. Equal weights are ordered by
/// (smaller actuator id, larger actuator id). Throws PreconditionError when
/// disconnected.
SpanningTree minimum_spanning_tree(const ActuatorGraph& graph,
                                   EdgeWeight weight = EdgeWeight::Chord);

struct MetricsOptions {
  ClosenessMode closeness = ClosenessMode::Unnormalized;
};

struct MetricsReport {
  std::vector<int> degree;
  std::vector<int> eccentricity;
  std::vector<double> closeness;
  std::vector<int> coreness;

  int diameter = 0;
  int radius = 0;
  double average_path_length = 0.0;
  double degree_mean = 0.0;
  double degree_variance = 0.0;
  std::map<int, double> degree_distribution;
  SpanningTree mst;
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
};

MetricsReport compute_metrics(const ActuatorGraph& graph, const MetricsOptions& options = {});

/// One row of the per-regime, per-fraction summary table.
struct SummaryRow {
  double mean_eccentricity = 0.0;  // mean over snapshots of the largest node eccentricity
  int max_eccentricity = 0;
  double mean_diameter = 0.0;
  double mean_radius = 0.0;
  int min_radius = 0;
  double mean_node_eccentricity = 0.0;  // mean over snapshots of the per-node mean
};

/// Reports without per-node eccentricities contribute their diameter as the
/// largest one. Throws PreconditionError for an empty list.
SummaryRow summarize_run(std::span<const MetricsReport> reports);

}  // namespace sda
