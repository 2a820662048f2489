#include "sda/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <string>
#include <tuple>

#include "sda/constants.hpp"
#include "sda/error.hpp"

namespace sda {

namespace {

void require_connected(const ActuatorGraph& graph) {
  const auto comps = graph.components();
  if (comps.size() <= 1) return;
  std::string msg = "graph is disconnected: " + std::to_string(comps.size()) + " components (";
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (i > 0) msg += ", ";
    msg += std::to_string(comps[i].size()) + " nodes from actuator " +
           std::to_string(graph.node_ids()[comps[i].front()]);
  }
  throw PreconditionError(msg + ")");
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[b] = a;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

ActuatorGraph::ActuatorGraph(std::vector<int> node_ids, std::vector<GraphEdge> edges)
    : node_ids_(std::move(node_ids)), edges_(std::move(edges)), adjacency_(node_ids_.size()) {
  const int n = static_cast<int>(node_ids_.size());
  {
    std::set<int> ids(node_ids_.begin(), node_ids_.end());
    if (ids.size() != node_ids_.size()) throw PreconditionError("duplicate node ids in graph");
  }
  std::set<std::pair<int, int>> seen;
  for (auto& e : edges_) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a < 0 || e.b >= n) throw PreconditionError("edge endpoint out of range");
    if (e.a == e.b) throw PreconditionError("self-loop on node " + std::to_string(e.a));
    if (!seen.emplace(e.a, e.b).second) {
      throw PreconditionError("repeated edge " + std::to_string(e.a) + "-" + std::to_string(e.b));
    }
    adjacency_[e.a].push_back(e.b);
    adjacency_[e.b].push_back(e.a);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

ActuatorGraph ActuatorGraph::from_triangulation(const SphericalTriangulation& tri) {
  const std::size_t n = tri.points.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    return tri.points[i].actuator_id < tri.points[j].actuator_id;
  });
  std::vector<int> position(n);
  std::vector<int> ids(n);
  for (std::size_t k = 0; k < n; ++k) {
    position[order[k]] = static_cast<int>(k);
    ids[k] = tri.points[order[k]].actuator_id;
  }
  std::vector<GraphEdge> edges;
  edges.reserve(tri.edges.size());
  for (const auto& [i, j] : tri.edges) {
    const Vec3& u = tri.points[i].vector;
    const Vec3& v = tri.points[j].vector;
    GraphEdge e;
    e.a = std::min(position[i], position[j]);
    e.b = std::max(position[i], position[j]);
    e.great_circle_km = angular_distance(u, v) * kEarthRadiusKm;
    e.chord_km = (u - v).norm() * kEarthRadiusKm;
    edges.push_back(e);
  }
  std::sort(edges.begin(), edges.end(),
            [](const GraphEdge& x, const GraphEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  return ActuatorGraph(std::move(ids), std::move(edges));
}

ActuatorGraph ActuatorGraph::from_pairs(int node_count, std::span<const std::pair<int, int>> pairs) {
  std::vector<int> ids(node_count);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<GraphEdge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) edges.push_back(GraphEdge{a, b, 1.0, 1.0});
  return ActuatorGraph(std::move(ids), std::move(edges));
}

std::vector<std::vector<int>> ActuatorGraph::components() const {
  const std::size_t n = node_count();
  std::vector<int> label(n, -1);
  std::vector<std::vector<int>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] >= 0) continue;
    const int c = static_cast<int>(out.size());
    out.emplace_back();
    std::vector<int> stack{static_cast<int>(s)};
    label[s] = c;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      out[c].push_back(u);
      for (const int v : adjacency_[u]) {
        if (label[v] < 0) {
          label[v] = c;
          stack.push_back(v);
        }
      }
    }
    std::sort(out[c].begin(), out[c].end());
  }
  return out;
}

HopMatrix hopcounts(const ActuatorGraph& graph) {
  require_connected(graph);
  const std::size_t n = graph.node_count();
  HopMatrix hops(n);
  std::vector<int> dist(n);
  std::vector<int> queue(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = static_cast<int>(s);
    while (head < tail) {
      const int u = queue[head++];
      for (const int v : graph.neighbors(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          queue[tail++] = v;
        }
      }
    }
    for (std::size_t t = 0; t < n; ++t) hops.at(s, t) = dist[t];
  }
  return hops;
}

double closeness(const HopMatrix& hops, std::size_t node, ClosenessMode mode) {
  const std::size_t n = hops.size();
  if (n < 2) throw PreconditionError("closeness is undefined for a single-node graph");
  long long total = 0;
  for (std::size_t j = 0; j < n; ++j) total += hops(node, j);
  const double inv = 1.0 / static_cast<double>(total);
  return mode == ClosenessMode::Normalized ? static_cast<double>(n - 1) * inv : inv;
}

int eccentricity(const HopMatrix& hops, std::size_t node) {
  int e = 0;
  for (std::size_t j = 0; j < hops.size(); ++j) e = std::max(e, hops(node, j));
  return e;
}

int diameter(const HopMatrix& hops) {
  int d = 0;
  for (std::size_t i = 0; i < hops.size(); ++i) d = std::max(d, eccentricity(hops, i));
  return d;
}

int radius(const HopMatrix& hops) {
  if (hops.size() == 0) return 0;
  int r = eccentricity(hops, 0);
  for (std::size_t i = 1; i < hops.size(); ++i) r = std::min(r, eccentricity(hops, i));
  return r;
}

double average_path_length(const HopMatrix& hops) {
  const std::size_t n = hops.size();
  if (n < 2) throw PreconditionError("average path length needs at least two nodes");
  long long total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) total += hops(i, j);
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  return static_cast<double>(total) / pairs;
}

DegreeStats degree_stats(const ActuatorGraph& graph) {
  DegreeStats s;
  const std::size_t n = graph.node_count();
  s.degrees.resize(n);
  std::map<int, std::size_t> counts;
  for (std::size_t i = 0; i < n; ++i) {
    s.degrees[i] = static_cast<int>(graph.degree(i));
    ++counts[s.degrees[i]];
  }
  if (n == 0) return s;
  const double a = static_cast<double>(n);
  s.mean = std::accumulate(s.degrees.begin(), s.degrees.end(), 0.0) / a;
  double ss = 0.0;
  for (const int d : s.degrees) ss += (d - s.mean) * (d - s.mean);
  s.variance = ss / a;
  for (const auto& [k, c] : counts) s.distribution[k] = static_cast<double>(c) / a;
  return s;
}

std::vector<int> kcore_decomposition(const ActuatorGraph& graph) {
  // Batagelj-Zaversnik bucket peeling, O(n + m).
  const std::size_t n = graph.node_count();
  std::vector<int> deg(n);
  int max_deg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    deg[i] = static_cast<int>(graph.degree(i));
    max_deg = std::max(max_deg, deg[i]);
  }
  std::vector<int> bin(max_deg + 1, 0);
  for (const int d : deg) ++bin[d];
  int start = 0;
  for (int d = 0; d <= max_deg; ++d) {
    const int count = bin[d];
    bin[d] = start;
    start += count;
  }
  std::vector<int> vert(n), pos(n);
  for (std::size_t v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]]++;
    vert[pos[v]] = static_cast<int>(v);
  }
  for (int d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  if (max_deg >= 0 && !bin.empty()) bin[0] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const int v = vert[i];
    for (const int u : graph.neighbors(v)) {
      if (deg[u] > deg[v]) {
        const int du = deg[u];
        const int pu = pos[u];
        const int pw = bin[du];
        const int w = vert[pw];
        if (u != w) {
          pos[u] = pw;
          vert[pu] = w;
          pos[w] = pu;
          vert[pw] = u;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  return deg;
}

SpanningTree minimum_spanning_tree(const ActuatorGraph& graph, EdgeWeight weight) {
  require_connected(graph);
  const auto& edges = graph.edges();
  const auto& ids = graph.node_ids();
  auto w = [&](const GraphEdge& e) {
    return weight == EdgeWeight::Chord ? e.chord_km : e.great_circle_km;
  };
  auto key = [&](std::size_t k) {
    const GraphEdge& e = edges[k];
    const int lo = std::min(ids[e.a], ids[e.b]);
    const int hi = std::max(ids[e.a], ids[e.b]);
    return std::tuple(w(e), lo, hi);
  };
  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return key(x) < key(y); });

  SpanningTree tree;
  DisjointSets sets(graph.node_count());
  for (const std::size_t k : order) {
    if (sets.unite(edges[k].a, edges[k].b)) {
      tree.edges.push_back(k);
      tree.total_chord_km += edges[k].chord_km;
      tree.total_great_circle_km += edges[k].great_circle_km;
      if (tree.edges.size() + 1 == graph.node_count()) break;
    }
  }
  std::sort(tree.edges.begin(), tree.edges.end());
  return tree;
}

MetricsReport compute_metrics(const ActuatorGraph& graph, const MetricsOptions& options) {
  if (graph.node_count() < 2) throw PreconditionError("metrics need at least two nodes");
  MetricsReport r;
  r.node_count = graph.node_count();
  r.edge_count = graph.edge_count();
  const HopMatrix hops = hopcounts(graph);
  const DegreeStats deg = degree_stats(graph);
  const std::size_t n = graph.node_count();

  r.degree = deg.degrees;
  r.degree_mean = deg.mean;
  r.degree_variance = deg.variance;
  r.degree_distribution = deg.distribution;
  r.eccentricity.resize(n);
  r.closeness.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.eccentricity[i] = eccentricity(hops, i);
    r.closeness[i] = closeness(hops, i, options.closeness);
  }
  r.diameter = *std::max_element(r.eccentricity.begin(), r.eccentricity.end());
  r.radius = *std::min_element(r.eccentricity.begin(), r.eccentricity.end());
  r.average_path_length = average_path_length(hops);
  r.coreness = kcore_decomposition(graph);
  r.mst = minimum_spanning_tree(graph);
  return r;
}

SummaryRow summarize_run(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw PreconditionError("cannot summarize an empty run");
  SummaryRow row;
  row.max_eccentricity = 0;
  row.min_radius = reports.front().radius;
  double sum_max_ecc = 0.0, sum_d = 0.0, sum_r = 0.0, sum_node_ecc = 0.0;
  for (const auto& r : reports) {
    const int max_ecc = r.eccentricity.empty()
                            ? r.diameter
                            : *std::max_element(r.eccentricity.begin(), r.eccentricity.end());
    sum_max_ecc += max_ecc;
    sum_d += r.diameter;
    sum_r += r.radius;
    if (!r.eccentricity.empty()) {
      sum_node_ecc += std::accumulate(r.eccentricity.begin(), r.eccentricity.end(), 0.0) /
                      static_cast<double>(r.eccentricity.size());
    }
    row.max_eccentricity = std::max(row.max_eccentricity, max_ecc);
    row.min_radius = std::min(row.min_radius, r.radius);
  }
  const double k = static_cast<double>(reports.size());
  row.mean_eccentricity = sum_max_ecc / k;
  row.mean_diameter = sum_d / k;
  row.mean_radius = sum_r / k;
  row.mean_node_eccentricity = sum_node_ecc / k;
  return row;
}

}  // namespace sda
