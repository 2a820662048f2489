// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.
//   acceptance [--work-dir DIR]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sda/consensus.hpp"
#include "sda/constants.hpp"
#include "sda/graph.hpp"
#include "sda/io.hpp"
#include "sda/propagation.hpp"
#include "sda/simulation.hpp"
#include "sda/tessellation.hpp"
#include "sda/tle.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  int failures = 0;
  std::string first_failure;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    pass = false;
    if (failures++ == 0) first_failure = what;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

sda::Catalog load(const std::string& path) {
  std::ifstream in(path);
  return sda::load_catalog(in);
}

// The 200 point sets shared by the first two criteria.
std::vector<std::vector<sda::UnitSpherePoint>> property_sets() {
  std::vector<std::vector<sda::UnitSpherePoint>> sets;
  std::mt19937_64 sizes(20240601);
  std::uniform_int_distribution<int> n(4, 60);
  for (int i = 0; i < 200; ++i) sets.push_back(oracle::point_set(70000 + i, n(sizes), oracle::shape_for(i)));
  return sets;
}

// Voronoi neighbours found geometrically: the midpoint of every cell-boundary
// arc is claimed by the nearest other seed, located by brute force.
std::vector<std::pair<int, int>> voronoi_neighbours(const sda::SphericalVoronoi& vor, double tol,
                                                    bool& equidistant) {
  std::set<std::pair<int, int>> out;
  equidistant = true;
  for (std::size_t s = 0; s < vor.cells.size(); ++s) {
    const auto& ring = vor.cells[s];
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const sda::Vec3 mid = (vor.vertices[ring[k]] + vor.vertices[ring[(k + 1) % ring.size()]]).normalized();
      const double own = oracle::angle(mid, vor.seeds[s].vector);
      int best = -1;
      double best_d = 1e9;
      for (std::size_t t = 0; t < vor.seeds.size(); ++t) {
        if (t == s) continue;
        const double d = oracle::angle(mid, vor.seeds[t].vector);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(t);
        }
      }
      if (std::abs(best_d - own) > tol) equidistant = false;
      out.insert({std::min<int>(s, best), std::max<int>(s, best)});
    }
  }
  return {out.begin(), out.end()};
}

Outcome geometry_suite(const std::vector<std::vector<sda::UnitSpherePoint>>& sets) {
  Outcome o;
  const auto t0 = Clock::now();
  constexpr double tol = 1e-9;
  std::size_t triangles = 0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string tag = "set " + std::to_string(i);
    const auto tri = sda::delaunay_on_sphere(sets[i]);
    const std::size_t v = tri.points.size();
    triangles += tri.triangles.size();
    for (const auto& t : tri.triangles) o.require(oracle::empty_circumcap(tri, t, tol), tag + ": circumcap not empty");
    o.require(tri.edges.size() == 3 * v - 6, tag + ": E != 3V-6");
    o.require(tri.triangles.size() == 2 * v - 4, tag + ": F != 2V-4");
    const std::set<std::pair<int, int>> edges(tri.edges.begin(), tri.edges.end());
    for (const auto& p : oracle::closest_pairs(tri.points)) {
      o.require(edges.count(p) == 1, tag + ": closest pair is not an edge");
    }
    const auto vor = sda::voronoi_dual(tri);
    bool equidistant = true;
    o.require(voronoi_neighbours(vor, tol, equidistant) == tri.edges, tag + ": Voronoi adjacency != edges");
    o.require(equidistant, tag + ": Voronoi boundary not equidistant");
  }
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 60.0, "runtime over 60 s");
  o.detail = std::to_string(sets.size()) + " sets, " + std::to_string(triangles) + " triangles, " +
             fmt("%.2f s", elapsed);
  return o;
}

Outcome mst_theorem(const std::vector<std::vector<sda::UnitSpherePoint>>& sets) {
  Outcome o;
  double worst = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const std::string tag = "set " + std::to_string(i);
    const auto tri = sda::delaunay_on_sphere(sets[i]);
    const auto g = sda::ActuatorGraph::from_triangulation(tri);
    const auto chord = sda::minimum_spanning_tree(g, sda::EdgeWeight::Chord);
    const auto arc = sda::minimum_spanning_tree(g, sda::EdgeWeight::GreatCircle);
    const double complete = oracle::complete_mst_chord(tri.points) * sda::kEarthRadiusKm;
    const double rel = std::abs(chord.total_chord_km - complete) / complete;
    worst = std::max(worst, rel);
    o.require(rel <= 1e-9, tag + ": MST total differs from complete graph");
    o.require(chord.edges == arc.edges, tag + ": chord and great-circle MSTs differ");
  }
  o.detail = "max relative gap " + fmt("%.2e", worst);
  return o;
}

Outcome metric_oracles() {
  Outcome o;
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 39;
    const std::string tag = "graph " + std::to_string(trial);
    const auto g = oracle::random_connected_graph(rng, n, 0.15 * (trial % 7) / 6.0);
    const auto fw = oracle::floyd_warshall(g);
    const auto h = sda::hopcounts(g);
    const auto r = sda::compute_metrics(g);
    int d = 0, rad = oracle::kInf;
    long long pair_sum = 0;
    for (int i = 0; i < n; ++i) {
      int ecc = 0;
      long long row = 0;
      for (int j = 0; j < n; ++j) {
        o.require(h(i, j) == fw[i][j], tag + ": hop matrix");
        ecc = std::max(ecc, fw[i][j]);
        row += fw[i][j];
        if (j > i) pair_sum += fw[i][j];
      }
      o.require(r.eccentricity[i] == ecc, tag + ": eccentricity");
      const double c = 1.0 / static_cast<double>(row);
      o.require(std::abs(r.closeness[i] - c) <= 1e-12 * c, tag + ": closeness");
      d = std::max(d, ecc);
      rad = std::min(rad, ecc);
    }
    o.require(r.diameter == d, tag + ": diameter");
    o.require(r.radius == rad, tag + ": radius");
    const double apl = static_cast<double>(pair_sum) / (n * (n - 1) / 2.0);
    o.require(std::abs(r.average_path_length - apl) <= 1e-12 * apl, tag + ": average path length");
    o.require(r.coreness == oracle::coreness(g), tag + ": coreness");
  }
  o.detail = "100 graphs, n = 2..40";
  return o;
}

Outcome structural_sanity(const sda::Catalog& catalog) {
  Outcome o;
  std::size_t snapshots = 0, invalid = 0;
  double worst = 0.0;
  for (auto regime : {sda::OrbitRegime::LEO, sda::OrbitRegime::MEO, sda::OrbitRegime::GEO,
                      sda::OrbitRegime::HEO}) {
    sda::SimulationConfig cfg;
    cfg.regime = regime;
    cfg.start_time = sda::parse_iso8601("2018-04-25T12:00:00Z");
    const auto result = sda::run_simulation(cfg, catalog);
    for (const auto& rec : result.records) {
      ++snapshots;
      if (!rec.valid) {
        ++invalid;
        o.require(false, std::string(sda::to_string(regime)) + ": invalid snapshot: " + rec.error);
        continue;
      }
      const std::string tag = std::string(sda::to_string(regime)) + " " + sda::to_iso8601(rec.timestamp);
      o.require(rec.global.radius <= rec.global.diameter, tag + ": R > D");
      o.require(rec.global.diameter <= 2 * rec.global.radius, tag + ": D > 2R");
      double total = 0.0;
      for (const auto& [deg, p] : rec.metrics.degree_distribution) total += p;
      worst = std::max(worst, std::abs(total - 1.0));
      o.require(std::abs(total - 1.0) <= 1e-12, tag + ": degree distribution does not sum to 1");
    }
  }
  o.detail = std::to_string(snapshots) + " snapshots over 4 regimes, " + std::to_string(invalid) +
             " invalid, max |sum Pr - 1| " + fmt("%.1e", worst);
  return o;
}

Outcome tle_fidelity() {
  Outcome o;
  const std::string name = "0 NEOSSAT  ";
  const std::string l1 = "1 39089U 13009D   18115.60454839 +.00000035 +00000-0 +27923-4 0  9992";
  const std::string l2 = "2 39089 098.5303 320.4424 0012356 092.9866 267.2733 14.34421818270178";
  const auto r = sda::parse_tle(name, l1, l2);
  o.require(r.name == "NEOSSAT", "name");
  o.require(r.norad_id == 39089, "norad id");
  o.require(r.classification == 'U', "classification");
  o.require(r.intl_designator == "13009D", "designator");
  o.require(r.full_epoch_year() == 2018 && r.epoch_day == 115.60454839, "epoch");
  o.require(r.mean_motion_dot == 0.00000035, "first derivative of mean motion");
  o.require(r.mean_motion_ddot.value() == 0.0, "second derivative of mean motion");
  o.require(r.b_star_field.mantissa == 27923 && r.b_star_field.exponent == -4, "B*");
  o.require(r.element_set_number == 999, "element set number");
  o.require(r.inclination_deg == 98.5303, "inclination");
  o.require(r.raan_deg == 320.4424, "RAAN");
  o.require(r.eccentricity == 0.0012356, "eccentricity");
  o.require(r.arg_perigee_deg == 92.9866, "argument of perigee");
  o.require(r.mean_anomaly_deg == 267.2733, "mean anomaly");
  o.require(r.mean_motion_rev_per_day == 14.34421818, "mean motion");
  o.require(r.rev_number == 27017, "revolution number");
  o.require(sda::format_tle_line1(r) == l1 && sda::format_tle_line2(r) == l2, "round trip");

  int perturbations = 0;
  for (const bool first : {true, false}) {
    const std::string& base = first ? l1 : l2;
    for (std::size_t col = 1; col < base.size(); ++col) {
      if (base[col] < '0' || base[col] > '9') continue;
      for (char d = '0'; d <= '9'; ++d) {
        if (d == base[col]) continue;
        std::string bad = base;
        bad[col] = d;
        ++perturbations;
        bool rejected = false;
        try {
          first ? sda::parse_tle(name, bad, l2) : sda::parse_tle(name, l1, bad);
        } catch (const sda::TleParseError&) {
          rejected = true;
        }
        o.require(rejected, "accepted perturbation at line " + std::to_string(first ? 1 : 2) +
                                " column " + std::to_string(col + 1));
      }
    }
  }
  o.detail = "16 fields exact, " + std::to_string(perturbations) + " perturbations rejected";
  return o;
}

sda::TleRecord synthetic(double n_rev_day, double e, double inc_deg) {
  sda::TleRecord r;
  r.name = "TEST";
  r.norad_id = 99999;
  r.epoch_year = 18;
  r.epoch_day = 115.5;
  r.mean_motion_rev_per_day = n_rev_day;
  r.eccentricity = e;
  r.inclination_deg = inc_deg;
  r.raan_deg = 40.0;
  r.arg_perigee_deg = 10.0;
  return r;
}

// Time for the in-plane position angle to sweep a full turn, to the millisecond.
double measured_period(const sda::TleRecord& r) {
  const sda::UtcTime t0 = sda::tle_epoch(r);
  const auto s0 = sda::mean_elements_to_state(r, t0);
  const sda::Vec3 h = sda::cross(s0.position_km, s0.velocity_km_s).normalized();
  auto swept = [&](std::int64_t ms, double previous) {
    const sda::Vec3 p = sda::mean_elements_to_state(r, sda::UtcTime{t0.ms + ms}).position_km;
    double a = std::atan2(sda::dot(h, sda::cross(s0.position_km, p)), sda::dot(s0.position_km, p));
    while (a < previous - M_PI) a += sda::kTwoPi;
    return a;
  };
  std::int64_t lo = 0;
  double angle = 0.0;
  for (;;) {
    const double next = swept(lo + 10000, angle);
    if (next >= sda::kTwoPi) break;
    angle = next;
    lo += 10000;
  }
  std::int64_t hi = lo + 10000;
  const double base = angle;
  while (hi - lo > 1) {
    const std::int64_t mid = (lo + hi) / 2;
    if (swept(mid, base) >= sda::kTwoPi) hi = mid; else lo = mid;
  }
  return static_cast<double>(hi) / 1000.0;
}

Outcome propagation_checks() {
  Outcome o;
  const auto circ = synthetic(15.2, 0.0, 51.6);
  const double a = sda::semi_major_axis_km(15.2);
  const sda::UtcTime t0 = sda::tle_epoch(circ);
  double radius_dev = 0.0;
  for (int k = 0; k <= 86400; k += 10) {
    const double rn = sda::mean_elements_to_state(circ, t0.plus_seconds(k)).position_km.norm();
    radius_dev = std::max(radius_dev, std::abs(rn - a));
  }
  o.require(radius_dev <= 1e-6, "circular radius varies by " + fmt("%.3e km", radius_dev));

  double period_err = 0.0;
  for (const auto& r : {circ, synthetic(14.34421818, 0.0012356, 98.5303), synthetic(2.0059, 0.72, 63.4),
                        synthetic(1.00273791, 0.0002, 0.05)}) {
    const double expected = sda::kSecondsPerDay / r.mean_motion_rev_per_day;
    const double err = std::abs(measured_period(r) - expected);
    period_err = std::max(period_err, err);
    o.require(err <= 0.1, "period off by " + fmt("%.4f s", err));
  }

  // Ideal geostationary: circular, equatorial, one turn per sidereal day.
  const auto geo = synthetic(sda::kSecondsPerDay / sda::kSiderealDaySeconds, 0.0, 0.0);
  const sda::UtcTime g0 = sda::tle_epoch(geo);
  const double lon0 = sda::eci_to_geodetic(sda::mean_elements_to_state(geo, g0)).longitude_deg;
  double drift = 0.0;
  for (int k = 0; k <= 86400; k += 600) {
    const double lon = sda::eci_to_geodetic(sda::mean_elements_to_state(geo, g0.plus_seconds(k))).longitude_deg;
    drift = std::max(drift, std::abs(std::remainder(lon - lon0, 360.0)));
  }
  o.require(drift < 0.1, "GEO drift " + fmt("%.4f deg", drift));
  o.detail = "radius dev " + fmt("%.1e km", radius_dev) + ", period err " + fmt("%.3f s", period_err) +
             ", GEO drift " + fmt("%.2e deg", drift);
  return o;
}

Outcome consensus_behaviour() {
  Outcome o;
  std::mt19937_64 rng(4242);
  constexpr int kTrials = 10000;
  int honest_fail = 0, tamper_fail = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const int n = 4 + static_cast<int>(rng() % 37);
    const auto g = oracle::random_connected_graph(rng, n, 0.1);
    sda::RoleCounts counts = sda::default_role_counts(g.node_count());
    if (trial % 2) {
      counts.approvers = 1 + rng() % (n / 2);
      counts.verifiers = 1 + rng() % (n - counts.approvers);
    }
    const auto roles = sda::assign_roles_degree(g, counts);
    sda::Bytes payload(1 + rng() % 64);
    for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
    const std::uint64_t key_seed = rng();

    const auto honest = sda::run_round(payload, roles, g, {}, key_seed);
    if (honest.message() != "Verification is valid!") ++honest_fail;

    std::vector<int> participants = roles.approvers;
    participants.insert(participants.end(), roles.verifiers.begin(), roles.verifiers.end());
    const int culprit = participants[rng() % participants.size()];
    const auto forged = sda::flip_byte(payload, rng() % payload.size(),
                                       static_cast<std::uint8_t>(1 + rng() % 255));
    const std::map<int, sda::Behavior> b{{culprit, sda::Behavior::tamper(forged)}};
    const auto tampered = sda::run_round(payload, roles, g, b, key_seed);
    if (tampered.message() != "Repeat Process!") ++tamper_fail;
  }
  o.require(honest_fail == 0, std::to_string(honest_fail) + " completeness failures");
  o.require(tamper_fail == 0, std::to_string(tamper_fail) + " soundness failures");
  o.detail = std::to_string(kTrials) + " honest and " + std::to_string(kTrials) +
             " tampered rounds, " + std::to_string(honest_fail + tamper_fail) + " failures";
  return o;
}

Outcome summary_and_trend(const sda::Catalog& catalog, const fs::path& work) {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t rows = 0;
  for (auto regime : {sda::OrbitRegime::LEO, sda::OrbitRegime::MEO, sda::OrbitRegime::GEO,
                      sda::OrbitRegime::HEO}) {
    sda::SimulationConfig cfg;
    cfg.regime = regime;
    cfg.fractions = sda::SimulationConfig::table_fractions(regime);
    cfg.start_time = sda::parse_iso8601("2018-04-25T12:00:00Z");
    const fs::path dir = work / "summary" / std::string(sda::to_string(regime));
    sda::export_run(sda::run_simulation(cfg, catalog), dir);
    std::ifstream in(dir / "summary.csv");
    std::string header;
    std::getline(in, header);
    o.require(header == "regime,fraction_pct,mean_ecc,max_ecc,mean_diameter,mean_radius,min_radius",
              "summary.csv header: " + header);
    std::string line;
    while (std::getline(in, line)) {
      const auto f = sda::csv::split(line);
      ++rows;
      o.require(f.size() == 7 && f[2] == f[4], "mean_ecc != mean_diameter in: " + line);
    }
  }

  // Points in a thin band around the equator, as GEO sub-satellite points are.
  std::vector<double> means;
  for (int n : {20, 40, 80}) {
    double total = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
      std::mt19937_64 rng(1000 * n + seed);
      std::uniform_real_distribution<double> lat(-2.0, 2.0), lon(-180.0, 180.0);
      std::vector<sda::UnitSpherePoint> pts;
      for (int i = 0; i < n; ++i) pts.push_back({oracle::from_lat_lon(lat(rng), lon(rng)), i});
      total += sda::compute_metrics(sda::ActuatorGraph::from_triangulation(sda::delaunay_on_sphere(pts))).diameter;
    }
    means.push_back(total / 10.0);
  }
  o.require(means[0] <= means[1] && means[1] <= means[2], "band diameter decreases with n");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 300.0, "runtime over 5 min");
  o.detail = std::to_string(rows) + " summary rows; band mean D " + fmt("%.1f", means[0]) + " / " +
             fmt("%.1f", means[1]) + " / " + fmt("%.1f", means[2]) + " for n = 20/40/80; " +
             fmt("%.1f s", elapsed);
  return o;
}

Outcome determinism(const sda::Catalog& catalog, const fs::path& work) {
  Outcome o;
  sda::SimulationConfig cfg;
  cfg.regime = sda::OrbitRegime::LEO;
  cfg.start_time = sda::parse_iso8601("2018-04-25T12:00:00Z");
  cfg.consensus = sda::ConsensusConfig{};
  cfg.consensus->strategy = sda::RoleStrategy::KCoreShell;
  std::vector<fs::path> dirs;
  for (unsigned threads : {1u, 4u}) {
    cfg.threads = threads;
    dirs.push_back(work / "determinism" / ("threads" + std::to_string(threads)));
    fs::remove_all(dirs.back());
    sda::export_run(sda::run_simulation(cfg, catalog), dirs.back());
  }
  std::size_t files = 0, bytes = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    if (!entry.is_regular_file()) continue;
    const auto name = entry.path().filename();
    const std::string a = slurp(entry.path());
    o.require(fs::exists(dirs[1] / name) && a == slurp(dirs[1] / name), name.string() + " differs");
    ++files;
    bytes += a.size();
  }
  o.require(files >= 4, "expected at least four output files");
  o.detail = std::to_string(files) + " files, " + std::to_string(bytes) + " bytes identical across 1 and 4 threads";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "sda_acceptance";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--work-dir") == 0 && i + 1 < argc) {
      work = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--work-dir DIR]\n", argv[0]);
      return 2;
    }
  }
  fs::create_directories(work);

  const sda::Catalog catalog = load(SDA_CATALOG);
  const auto sets = property_sets();

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"geometry property suite", [&] { return geometry_suite(sets); }},
      {"MST subgraph of the Delaunay triangulation", [&] { return mst_theorem(sets); }},
      {"metric oracle equivalence", metric_oracles},
      {"structural sanity", [&] { return structural_sanity(catalog); }},
      {"TLE fidelity", tle_fidelity},
      {"propagation checks", propagation_checks},
      {"consensus behaviour", consensus_behaviour},
      {"summary schema and band trend", [&] { return summary_and_trend(catalog, work); }},
      {"determinism", [&] { return determinism(catalog, work); }},
  };

  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.failures = 1;
      o.first_failure = std::string("exception: ") + e.what();
    }
    std::printf("%s %zu %s: %s", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    if (!o.pass) std::printf(" [%d failures, first: %s]", o.failures, o.first_failure.c_str());
    std::printf("\n");
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
