#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "sda/error.hpp"
#include "sda/simulation.hpp"

namespace {

sda::Catalog load(const std::string& path) {
  std::ifstream in(path);
  return sda::load_catalog(in);
}

const sda::Catalog& bundled() {
  static const sda::Catalog c = load(SDA_CATALOG);
  return c;
}

sda::UtcTime catalog_start() { return sda::parse_iso8601("2018-04-25T12:00:00Z"); }

}  // namespace

TEST_CASE("fraction presets") {
  const auto d = sda::SimulationConfig::default_fractions();
  REQUIRE(d.size() == 10);
  CHECK(d.front() == 5.0);
  CHECK(d.back() == 95.0);
  CHECK(sda::SimulationConfig::table_fractions(sda::OrbitRegime::LEO) ==
        std::vector<double>{10, 30, 50, 70, 90});
  CHECK(sda::SimulationConfig::table_fractions(sda::OrbitRegime::GEO) ==
        std::vector<double>{10, 30, 50, 70});
}

TEST_CASE("configuration validation") {
  sda::SimulationConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.snapshot_count() == 144);
  c.duration_s = 600.0;
  CHECK(c.snapshot_count() == 1);
  c.duration_s = 601.0;
  CHECK(c.snapshot_count() == 2);
  c.duration_s = 599.0;
  CHECK_THROWS_AS(c.validate(), sda::PreconditionError);
  c = {};
  c.time_step_s = 0.0;
  CHECK_THROWS_AS(c.validate(), sda::PreconditionError);
  c = {};
  c.fractions = {0.0};
  CHECK_THROWS_AS(c.validate(), sda::PreconditionError);
  c.fractions = {100.5};
  CHECK_THROWS_AS(c.validate(), sda::PreconditionError);
  c.fractions = {};
  CHECK_THROWS_AS(c.validate(), sda::PreconditionError);
}

TEST_CASE("actuator sampling") {
  const auto& c = bundled();
  const auto& leo = c.bucket(sda::OrbitRegime::LEO);
  std::set<int> leo_ids;
  for (auto i : leo) leo_ids.insert(c.records()[i].norad_id);

  for (double f : sda::SimulationConfig::default_fractions()) {
    const auto s = sda::sample_actuators(c, sda::OrbitRegime::LEO, f, 42);
    CHECK(s.size() == std::max<std::size_t>(4, static_cast<std::size_t>(f * 120 / 100 + 0.5)));
    CHECK(std::is_sorted(s.begin(), s.end()));  // catalog order is ascending id here
    CHECK(std::set<int>(s.begin(), s.end()).size() == s.size());
    for (int id : s) CHECK(leo_ids.count(id) == 1);
    CHECK(s == sda::sample_actuators(c, sda::OrbitRegime::LEO, f, 42));
  }
  // 2.5% of 16 rounds down to 0, so the floor of four applies.
  CHECK(sda::sample_actuators(c, sda::OrbitRegime::HEO, 2.5, 1).size() == 4);
  CHECK(sda::sample_actuators(c, sda::OrbitRegime::GEO, 2.5, 1).size() == 4);    // 1.5 -> 2 -> 4
  CHECK(sda::sample_actuators(c, sda::OrbitRegime::GEO, 17.5, 1).size() == 11);  // 10.5 -> 11
  const auto all = sda::sample_actuators(c, sda::OrbitRegime::MEO, 100.0, 3);
  CHECK(all.size() == 32);

  const auto small = sda::sample_actuators(c, sda::OrbitRegime::LEO, 10, 7);
  const auto big = sda::sample_actuators(c, sda::OrbitRegime::LEO, 50, 7);
  CHECK(std::includes(big.begin(), big.end(), small.begin(), small.end()));
  CHECK(small != sda::sample_actuators(c, sda::OrbitRegime::LEO, 10, 8));
  CHECK_THROWS_AS(sda::sample_actuators(c, sda::OrbitRegime::LEO, 0.0, 1), sda::PreconditionError);
}

TEST_CASE("sample size on a large bucket") {
  // 10% of 2,564 is 256.4.
  std::vector<sda::TleRecord> records;
  for (int i = 0; i < 2564; ++i) {
    sda::TleRecord r;
    r.norad_id = 10000 + i;
    r.mean_motion_rev_per_day = 15.0;
    r.eccentricity = 0.001;
    records.push_back(r);
  }
  const sda::Catalog c(records);
  CHECK(sda::sample_actuators(c, sda::OrbitRegime::LEO, 10, 42).size() == 256);
  const auto all = sda::sample_actuators(c, sda::OrbitRegime::LEO, 100, 42);
  REQUIRE(all.size() == 2564);
  CHECK(all.front() == 10000);
  CHECK(all.back() == 12563);
}

TEST_CASE("regimes with fewer than four actuators are refused") {
  const auto c = load(SDA_TEST_DATA "/neossat.tle");
  CHECK_THROWS_AS(sda::sample_actuators(c, sda::OrbitRegime::LEO, 100, 1), sda::PreconditionError);
  sda::SimulationConfig cfg;
  cfg.fractions = {100};
  cfg.duration_s = cfg.time_step_s;
  cfg.start_time = catalog_start();
  CHECK_THROWS_AS(sda::run_simulation(cfg, c), sda::PreconditionError);
}

TEST_CASE("four-satellite fixture") {
  const auto c = load(SDA_TEST_DATA "/four_sats.tle");
  sda::SimulationConfig cfg;
  cfg.fractions = {100};
  cfg.time_step_s = 600;
  cfg.duration_s = 1200;
  cfg.start_time = catalog_start();
  cfg.keep_geometry = true;
  cfg.threads = 1;
  const auto r = sda::run_simulation(cfg, c);
  REQUIRE(r.records.size() == 2);
  CHECK(r.records[1].timestamp.seconds_since(r.records[0].timestamp) == 600.0);
  for (const auto& rec : r.records) {
    REQUIRE(rec.valid);
    CHECK(rec.nodes.size() == 4);
    CHECK(rec.edges.size() == 6);  // tetrahedron: 3V - 6
    CHECK(rec.global.diameter == 1);
    CHECK(rec.global.radius == 1);
    CHECK(rec.geometry);
    CHECK(rec.geometry->triangulation.triangles.size() == 4);
    CHECK(std::count_if(rec.edges.begin(), rec.edges.end(), [](const auto& e) { return e.in_mst; }) == 3);
    for (std::size_t i = 1; i < rec.nodes.size(); ++i) CHECK(rec.nodes[i - 1].norad_id < rec.nodes[i].norad_id);
    for (const auto& e : rec.edges) {
      CHECK(e.norad_a < e.norad_b);
      CHECK(e.chord_km <= e.great_circle_km);
    }
  }
  REQUIRE(r.summary.size() == 1);
  CHECK(r.summary[0].snapshots == 2);
  CHECK(r.summary[0].row.mean_diameter == 1.0);
  CHECK(r.summary[0].row.mean_eccentricity == r.summary[0].row.mean_diameter);
}

TEST_CASE("runs are deterministic across thread counts") {
  sda::SimulationConfig cfg;
  cfg.regime = sda::OrbitRegime::GEO;
  cfg.fractions = {30, 70};
  cfg.time_step_s = 3600;
  cfg.duration_s = 6 * 3600;
  cfg.start_time = catalog_start();
  cfg.consensus = sda::ConsensusConfig{};
  cfg.threads = 1;
  const auto a = sda::run_simulation(cfg, bundled());
  cfg.threads = 4;
  const auto b = sda::run_simulation(cfg, bundled());
  REQUIRE(a.records.size() == 12);
  REQUIRE(b.records.size() == a.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].timestamp == b.records[i].timestamp);
    CHECK(a.records[i].fraction_pct == b.records[i].fraction_pct);
    CHECK(a.records[i].global.mst_total_km == b.records[i].global.mst_total_km);
    CHECK(a.records[i].metrics.closeness == b.records[i].metrics.closeness);
    REQUIRE(a.records[i].consensus.has_value());
    CHECK(*a.records[i].consensus == *b.records[i].consensus);
    CHECK((*a.records[i].consensus)["outcome"] == "Valid");
  }
  CHECK(a.records.front().fraction_pct == 30.0);
  CHECK(a.records.back().fraction_pct == 70.0);
}

TEST_CASE("every regime honours the diameter bounds") {
  for (auto regime : {sda::OrbitRegime::LEO, sda::OrbitRegime::MEO, sda::OrbitRegime::GEO,
                      sda::OrbitRegime::HEO}) {
    sda::SimulationConfig cfg;
    cfg.regime = regime;
    cfg.fractions = sda::SimulationConfig::table_fractions(regime);
    cfg.time_step_s = 7200;
    cfg.start_time = catalog_start();
    const auto r = sda::run_simulation(cfg, bundled());
    CHECK(r.records.size() == cfg.fractions.size() * 12);
    std::map<double, std::size_t> nodes_per_fraction;
    for (const auto& rec : r.records) {
      const auto it = nodes_per_fraction.emplace(rec.fraction_pct, rec.nodes.size() + rec.aliases.size()).first;
      CHECK(it->second == rec.nodes.size() + rec.aliases.size());
      CAPTURE(rec.error);
      REQUIRE(rec.valid);
      CHECK(rec.global.radius <= rec.global.diameter);
      CHECK(rec.global.diameter <= 2 * rec.global.radius);
      CHECK(rec.global.edge_count == 3 * rec.global.node_count - 6);
    }
  }
}

TEST_CASE("metrics can be recomputed from stored rows") {
  sda::SimulationConfig cfg;
  cfg.fractions = {50};
  cfg.duration_s = cfg.time_step_s;
  cfg.start_time = catalog_start();
  const auto r = sda::run_simulation(cfg, bundled());
  REQUIRE(r.records.size() == 1);
  sda::TimeSeriesRecord copy = r.records[0];
  for (auto& n : copy.nodes) n.degree = n.eccentricity = n.coreness = 0;
  for (auto& e : copy.edges) e.in_mst = false;
  copy.global = {};
  sda::recompute_metrics(copy);
  const auto& orig = r.records[0];
  for (std::size_t i = 0; i < copy.nodes.size(); ++i) {
    CHECK(copy.nodes[i].degree == orig.nodes[i].degree);
    CHECK(copy.nodes[i].eccentricity == orig.nodes[i].eccentricity);
    CHECK(copy.nodes[i].coreness == orig.nodes[i].coreness);
    CHECK(copy.nodes[i].closeness == orig.nodes[i].closeness);
  }
  for (std::size_t i = 0; i < copy.edges.size(); ++i) CHECK(copy.edges[i].in_mst == orig.edges[i].in_mst);
  CHECK(copy.global.diameter == orig.global.diameter);
  CHECK(copy.global.mst_total_km == doctest::Approx(orig.global.mst_total_km).epsilon(1e-12));
}

TEST_CASE("summary from global rows matches the run summary") {
  sda::SimulationConfig cfg;
  cfg.regime = sda::OrbitRegime::MEO;
  cfg.fractions = {30, 90};
  cfg.time_step_s = 3600;
  cfg.start_time = catalog_start();
  const auto r = sda::run_simulation(cfg, bundled());
  const auto s = sda::summarize_globals(sda::OrbitRegime::MEO, r.records);
  REQUIRE(s.size() == r.summary.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    CHECK(s[i].fraction_pct == r.summary[i].fraction_pct);
    CHECK(s[i].snapshots == r.summary[i].snapshots);
    CHECK(s[i].row.mean_diameter == r.summary[i].row.mean_diameter);
    CHECK(s[i].row.mean_eccentricity == r.summary[i].row.mean_eccentricity);
    CHECK(s[i].row.max_eccentricity == r.summary[i].row.max_eccentricity);
    CHECK(s[i].row.mean_radius == r.summary[i].row.mean_radius);
    CHECK(s[i].row.min_radius == r.summary[i].row.min_radius);
  }
}

TEST_CASE("stale element sets produce warnings") {
  sda::SimulationConfig cfg;
  cfg.regime = sda::OrbitRegime::HEO;
  cfg.fractions = {100};
  cfg.duration_s = cfg.time_step_s;
  cfg.start_time = sda::parse_iso8601("2018-07-01T00:00:00Z");
  const auto r = sda::run_simulation(cfg, bundled());
  CHECK_FALSE(r.warnings.empty());
}
