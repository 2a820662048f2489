// sda: command-line front end for the actuator topology pipeline.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sda/consensus.hpp"
#include "sda/error.hpp"
#include "sda/graph.hpp"
#include "sda/io.hpp"
#include "sda/simulation.hpp"
#include "sda/tle.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutputDirEnv = "SDA_OUTPUT_DIR";

fs::path default_output_dir() {
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return "sda_output";
}

json read_config_file(const fs::path& path) {
  std::ifstream in = sda::open_input(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw sda::InputError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw sda::InputError(path.string() + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (value.is_object()) throw sda::InputError(path.string() + ": key \"" + key + "\" is nested");
  }
  return j;
}

template <typename T>
T config_value(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw sda::InputError("config key \"" + key + "\": " + e.what());
  }
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw sda::InputError("bad fraction \"" + item + "\"");
    }
  }
  if (out.empty()) throw sda::InputError("empty fraction list");
  return out;
}

sda::OrbitRegime parse_regime(const std::string& text) {
  const auto r = sda::regime_from_string(text);
  if (!r) throw sda::InputError("unknown regime \"" + text + "\" (LEO, MEO, GEO or HEO)");
  return *r;
}

sda::RoleStrategy parse_strategy(const std::string& text) {
  const auto s = sda::strategy_from_string(text);
  if (!s) throw sda::InputError("unknown strategy \"" + text + "\" (degree or kcore)");
  return *s;
}

sda::Catalog load_catalog_file(const fs::path& path, bool skip_invalid) {
  std::ifstream in = sda::open_input(path);
  sda::CatalogOptions options;
  options.policy = skip_invalid ? sda::ParsePolicy::SkipAndReport : sda::ParsePolicy::FailFast;
  sda::Catalog catalog = sda::load_catalog(in, options);
  for (const auto& d : catalog.diagnostics()) {
    std::cerr << "line:" << d.line << ": " << d.message << '\n';
  }
  return catalog;
}

void print_summary(std::ostream& out, const std::vector<sda::SummaryEntry>& summary) {
  char line[160];
  std::snprintf(line, sizeof line, "%-6s %8s %9s %8s %9s %9s %8s %10s\n", "regime", "fraction",
                "mean_ecc", "max_ecc", "mean_diam", "mean_rad", "min_rad", "node_ecc");
  out << line;
  for (const auto& s : summary) {
    std::snprintf(line, sizeof line, "%-6s %8s %9.3f %8d %9.3f %9.3f %8d %10.3f\n",
                  std::string(sda::to_string(s.regime)).c_str(),
                  sda::csv::fraction(s.fraction_pct).c_str(), s.row.mean_eccentricity,
                  s.row.max_eccentricity, s.row.mean_diameter, s.row.mean_radius, s.row.min_radius,
                  s.row.mean_node_eccentricity);
    out << line;
  }
}

// ---------------------------------------------------------------- parse

struct ParseArgs {
  std::string tle_path;
  bool skip_invalid = false;
};

int cmd_parse(const ParseArgs& args) {
  const sda::Catalog catalog = load_catalog_file(args.tle_path, args.skip_invalid);
  std::cout << "records: " << catalog.size() << '\n';
  for (const auto regime : sda::kAllRegimes) {
    std::cout << sda::to_string(regime) << ": " << catalog.bucket(regime).size() << '\n';
  }
  if (!catalog.diagnostics().empty()) {
    std::cout << "skipped: " << catalog.diagnostics().size() << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string config_path;
  std::string catalog_path;
  std::string regime;
  std::string fractions;
  bool table_preset = false;
  double time_step = 0;
  double duration = 0;
  std::string start;
  std::uint64_t seed = 0;
  std::string consensus;
  std::size_t approvers = 0;
  std::size_t verifiers = 0;
  std::string payload;
  std::uint64_t key_seed = 0;
  std::string output;
  unsigned threads = 0;
  bool geojson = false;
  bool skip_invalid = false;
  bool quiet = false;
};

int cmd_simulate(const SimulateArgs& a, const CLI::App& cmd) {
  const auto given = [&](const char* flag) { return cmd.count(flag) > 0; };

  json file = json::object();
  if (!a.config_path.empty()) file = read_config_file(a.config_path);
  const auto from_file = [&](const char* key) { return file.contains(key); };

  // Effective values: flag, else file, else default.
  std::string catalog_path = given("--catalog") ? a.catalog_path
                             : from_file("catalog") ? config_value<std::string>(file, "catalog")
                                                    : std::string();
  if (catalog_path.empty()) throw sda::InputError("no catalog given (--catalog or config \"catalog\")");
  const bool skip_invalid = given("--skip-invalid") ? true
                            : from_file("skip_invalid") ? config_value<bool>(file, "skip_invalid")
                                                        : false;
  const sda::Catalog catalog = load_catalog_file(catalog_path, skip_invalid);

  sda::SimulationConfig config;
  if (given("--regime")) {
    config.regime = parse_regime(a.regime);
  } else if (from_file("regime")) {
    config.regime = parse_regime(config_value<std::string>(file, "regime"));
  }

  if (given("--fractions")) {
    config.fractions = parse_fractions(a.fractions);
  } else if (given("--table-preset")) {
    config.fractions = sda::SimulationConfig::table_fractions(config.regime);
  } else if (from_file("fractions")) {
    const json& f = file.at("fractions");
    config.fractions = f.is_string() ? parse_fractions(f.get<std::string>())
                                     : config_value<std::vector<double>>(file, "fractions");
  } else if (from_file("table_preset") && config_value<bool>(file, "table_preset")) {
    config.fractions = sda::SimulationConfig::table_fractions(config.regime);
  }

  if (given("--time-step")) config.time_step_s = a.time_step;
  else if (from_file("time_step")) config.time_step_s = config_value<double>(file, "time_step");
  if (given("--duration")) config.duration_s = a.duration;
  else if (from_file("duration")) config.duration_s = config_value<double>(file, "duration");
  if (given("--seed")) config.rng_seed = a.seed;
  else if (from_file("seed")) config.rng_seed = config_value<std::uint64_t>(file, "seed");
  if (given("--threads")) config.threads = a.threads;
  else if (from_file("threads")) config.threads = config_value<unsigned>(file, "threads");

  if (given("--start")) {
    config.start_time = sda::parse_iso8601(a.start);
  } else if (from_file("start_time")) {
    config.start_time = sda::parse_iso8601(config_value<std::string>(file, "start_time"));
  } else {
    // Latest epoch in the regime keeps every element set as fresh as possible.
    const auto& bucket = catalog.bucket(config.regime);
    if (bucket.empty()) {
      throw sda::PreconditionError(std::string(sda::to_string(config.regime)) + " bucket is empty");
    }
    sda::UtcTime latest{INT64_MIN};
    for (std::size_t i : bucket) latest = std::max(latest, sda::tle_epoch(catalog.records()[i]));
    config.start_time = sda::UtcTime{latest.ms - latest.ms % 60000};
  }

  std::string strategy = given("--consensus") ? a.consensus
                         : from_file("consensus") ? config_value<std::string>(file, "consensus")
                                                  : std::string("none");
  if (strategy != "none") {
    sda::ConsensusConfig cc;
    cc.strategy = parse_strategy(strategy);
    std::size_t approvers = given("--approvers") ? a.approvers
                            : from_file("approvers") ? config_value<std::size_t>(file, "approvers")
                                                     : 0;
    std::size_t verifiers = given("--verifiers") ? a.verifiers
                            : from_file("verifiers") ? config_value<std::size_t>(file, "verifiers")
                                                     : 0;
    if ((approvers == 0) != (verifiers == 0)) {
      throw sda::InputError("--approvers and --verifiers go together");
    }
    if (approvers) cc.counts = sda::RoleCounts{approvers, verifiers};
    if (given("--payload")) cc.payload = a.payload;
    else if (from_file("payload")) cc.payload = config_value<std::string>(file, "payload");
    if (given("--key-seed")) cc.key_seed = a.key_seed;
    else if (from_file("key_seed")) cc.key_seed = config_value<std::uint64_t>(file, "key_seed");
    config.consensus = cc;
  }

  const bool geojson = given("--geojson") ? true
                       : from_file("geojson") ? config_value<bool>(file, "geojson")
                                              : false;
  config.keep_geometry = geojson;
  const fs::path output = given("--output")       ? fs::path(a.output)
                          : from_file("output_dir") ? fs::path(config_value<std::string>(file, "output_dir"))
                                                    : default_output_dir();

  const sda::SimulationResult result =
      sda::run_simulation(config, catalog, [&](std::size_t done, std::size_t total) {
        if (!a.quiet && (done == total || done % 50 == 0)) {
          std::cerr << "\rsnapshots " << done << "/" << total << std::flush;
          if (done == total) std::cerr << '\n';
        }
      });
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';

  sda::export_run(result, output, sda::ExportOptions{geojson});

  json effective = {
      {"catalog", catalog_path},
      {"regime", std::string(sda::to_string(config.regime))},
      {"fractions", config.fractions},
      {"time_step", config.time_step_s},
      {"duration", config.duration_s},
      {"start_time", sda::to_iso8601(config.start_time)},
      {"seed", config.rng_seed},
      {"consensus", strategy},
      {"geojson", geojson},
      {"skip_invalid", skip_invalid},
      {"output_dir", output.string()},
  };
  if (config.consensus) {
    effective["payload"] = config.consensus->payload;
    effective["key_seed"] = config.consensus->key_seed;
    if (config.consensus->counts) {
      effective["approvers"] = config.consensus->counts->approvers;
      effective["verifiers"] = config.consensus->counts->verifiers;
    }
  }
  std::ofstream echo = sda::open_output(output / "config.json");
  echo << effective.dump(2) << '\n';

  print_summary(std::cout, result.summary);
  std::size_t invalid = 0;
  for (const auto& r : result.records) invalid += r.valid ? 0 : 1;
  std::cout << "snapshots: " << result.records.size() << " (" << invalid << " invalid)\n"
            << "output: " << output.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string nodes;
  std::string edges;
  std::string output;
  bool normalized = false;
};

int cmd_metrics(const MetricsArgs& a) {
  std::ifstream nodes = sda::open_input(a.nodes);
  std::ifstream edges = sda::open_input(a.edges);
  std::vector<sda::TimeSeriesRecord> records = sda::read_snapshots(nodes, edges);
  if (records.empty()) throw sda::InputError(a.nodes + ": no snapshots");
  sda::MetricsOptions options;
  if (a.normalized) options.closeness = sda::ClosenessMode::Normalized;
  for (auto& r : records) {
    try {
      sda::recompute_metrics(r, options);
    } catch (const sda::PreconditionError& e) {
      throw sda::PreconditionError(sda::to_iso8601(r.timestamp) + " at " +
                                   sda::csv::fraction(r.fraction_pct) + "%: " + e.what());
    }
  }
  const fs::path output = a.output.empty() ? default_output_dir() : fs::path(a.output);
  {
    std::ofstream out = sda::open_output(output / "nodes.csv");
    sda::write_nodes_csv(out, records);
  }
  {
    std::ofstream out = sda::open_output(output / "edges.csv");
    sda::write_edges_csv(out, records);
  }
  {
    std::ofstream out = sda::open_output(output / "globals.csv");
    sda::write_globals_csv(out, records);
  }
  std::cout << "snapshots: " << records.size() << "\noutput: " << output.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------- consensus

struct ConsensusArgs {
  std::string edges;
  std::string nodes;
  std::string timestamp;
  double fraction = 0;
  std::string strategy = "degree";
  std::size_t approvers = 0;
  std::size_t verifiers = 0;
  std::vector<std::string> tamper;
  std::string payload = "sda-observation";
  std::uint64_t seed = 0;
  std::string transcript;
};

int cmd_consensus(const ConsensusArgs& a, const CLI::App& cmd) {
  std::vector<sda::TimeSeriesRecord> records;
  std::ifstream edges = sda::open_input(a.edges);
  if (a.nodes.empty()) {
    records = sda::read_edges_csv(edges);
  } else {
    std::ifstream nodes = sda::open_input(a.nodes);
    records = sda::read_snapshots(nodes, edges);
  }
  const sda::TimeSeriesRecord* chosen = nullptr;
  const std::optional<sda::UtcTime> when =
      a.timestamp.empty() ? std::nullopt : std::optional(sda::parse_iso8601(a.timestamp));
  for (const auto& r : records) {
    if (when && r.timestamp != *when) continue;
    if (cmd.count("--fraction") && r.fraction_pct != a.fraction) continue;
    chosen = &r;
    break;
  }
  if (!chosen) throw sda::InputError(a.edges + ": no snapshot matches the selection");

  const sda::ActuatorGraph graph = sda::snapshot_graph(*chosen);
  const sda::RoleStrategy strategy = parse_strategy(a.strategy);
  sda::RoleAssignment assignment;
  if (strategy == sda::RoleStrategy::KCoreShell) {
    assignment = sda::assign_roles_kcore(graph, chosen->timestamp);
  } else {
    if ((a.approvers == 0) != (a.verifiers == 0)) {
      throw sda::InputError("--approvers and --verifiers go together");
    }
    const sda::RoleCounts counts = a.approvers ? sda::RoleCounts{a.approvers, a.verifiers}
                                               : sda::default_role_counts(graph.node_count());
    assignment = sda::assign_roles_degree(graph, counts, chosen->timestamp);
  }

  const sda::Bytes payload = sda::to_bytes(a.payload);
  std::map<int, sda::Behavior> behaviors;
  for (const auto& spec : a.tamper) {
    // <node id>[:<byte index>]
    const auto colon = spec.find(':');
    int id = 0;
    std::size_t byte = 0;
    try {
      id = std::stoi(spec.substr(0, colon));
      if (colon != std::string::npos) byte = std::stoul(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw sda::InputError("bad tamper spec \"" + spec + "\", expected <id>[:<byte>]");
    }
    if (byte >= payload.size()) {
      throw sda::PreconditionError("tamper byte " + std::to_string(byte) + " outside the payload");
    }
    const auto has = [id](const std::vector<int>& v) {
      return std::binary_search(v.begin(), v.end(), id);
    };
    if (!has(assignment.approvers) && !has(assignment.verifiers)) {
      throw sda::PreconditionError("tamper node " + std::to_string(id) +
                                   " is neither approver nor verifier in this round");
    }
    behaviors[id] = sda::Behavior::tamper(sda::flip_byte(payload, byte));
  }

  const sda::ConsensusRound round = sda::run_round(payload, assignment, graph, behaviors, a.seed);
  json record = sda::transcript_record(round);
  record["timestamp"] = sda::to_iso8601(chosen->timestamp);
  record["fraction_pct"] = chosen->fraction_pct;
  if (!a.transcript.empty()) {
    std::ofstream out = sda::open_output(a.transcript);
    out << record.dump() << '\n';
  }

  const sda::MessageCost cost = sda::message_cost(assignment);
  std::cout << "snapshot: " << sda::to_iso8601(chosen->timestamp) << " at "
            << sda::csv::fraction(chosen->fraction_pct) << "%\n"
            << "strategy: " << sda::to_string(strategy) << '\n'
            << "approvers: " << assignment.approvers.size() << '\n'
            << "verifiers: " << assignment.verifiers.size() << '\n'
            << "messages: " << cost.total << " (approval " << cost.approval << ", verification "
            << cost.verification << ")\n"
            << round.message() << '\n';
  return 0;
}

// ---------------------------------------------------------------- summarize

struct SummarizeArgs {
  std::string globals;
  std::string regime = "LEO";
  std::string output;
};

int cmd_summarize(const SummarizeArgs& a) {
  std::ifstream in = sda::open_input(a.globals);
  const std::vector<sda::TimeSeriesRecord> records = sda::read_globals_csv(in);
  if (records.empty()) throw sda::InputError(a.globals + ": no rows");
  const auto summary = sda::summarize_globals(parse_regime(a.regime), records);
  const fs::path output = a.output.empty() ? default_output_dir() : fs::path(a.output);
  std::ofstream out = sda::open_output(output / "summary.csv");
  sda::write_summary_csv(out, summary);
  print_summary(std::cout, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space-domain-awareness actuator topology tool"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sda 0.1.0");

  ParseArgs parse_args;
  auto* parse = app.add_subcommand("parse", "Load a TLE catalog and print per-regime counts");
  parse->add_option("tle", parse_args.tle_path, "TLE file (2- or 3-line blocks)")->required();
  parse->add_flag("--skip-invalid", parse_args.skip_invalid,
                  "Report and skip bad records instead of stopping");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run the time-stepped topology sweep");
  simulate->add_option("--config", sim.config_path, "Flat JSON config; flags take priority");
  simulate->add_option("--catalog", sim.catalog_path, "TLE catalog");
  simulate->add_option("--regime", sim.regime, "LEO, MEO, GEO or HEO (default LEO)");
  simulate->add_option("--fractions", sim.fractions, "Comma-separated percentages");
  simulate->add_flag("--table-preset", sim.table_preset, "Use the summary-table fraction list");
  simulate->add_option("--time-step", sim.time_step, "Seconds between snapshots (default 600)");
  simulate->add_option("--duration", sim.duration, "Simulated seconds (default 86400)");
  simulate->add_option("--start", sim.start, "ISO-8601 start (default: latest epoch in regime)");
  simulate->add_option("--seed", sim.seed, "Sampling seed (default 42)");
  simulate->add_option("--consensus", sim.consensus, "none, degree or kcore");
  simulate->add_option("--approvers", sim.approvers, "Approver count per round");
  simulate->add_option("--verifiers", sim.verifiers, "Verifier count per round");
  simulate->add_option("--payload", sim.payload, "Payload signed in each round");
  simulate->add_option("--key-seed", sim.key_seed, "Seed for node signing keys");
  simulate->add_option("--output", sim.output,
                       std::string("Output directory (default $") + kOutputDirEnv +
                           " or ./sda_output)");
  simulate->add_option("--threads", sim.threads, "Worker threads (default: all cores)");
  simulate->add_flag("--geojson", sim.geojson, "Write one GeoJSON file per snapshot");
  simulate->add_flag("--skip-invalid", sim.skip_invalid, "Skip bad catalog records");
  simulate->add_flag("--quiet", sim.quiet, "No progress output");

  MetricsArgs met;
  auto* metrics = app.add_subcommand("metrics", "Recompute metrics from nodes.csv and edges.csv");
  metrics->add_option("--nodes", met.nodes, "nodes.csv")->required();
  metrics->add_option("--edges", met.edges, "edges.csv")->required();
  metrics->add_option("--output", met.output, "Output directory");
  metrics->add_flag("--normalized-closeness", met.normalized, "Scale closeness by n - 1");

  ConsensusArgs con;
  auto* consensus = app.add_subcommand("consensus", "Run one approver/verifier round on a snapshot");
  consensus->add_option("--edges", con.edges, "edges.csv")->required();
  consensus->add_option("--nodes", con.nodes, "nodes.csv (optional)");
  consensus->add_option("--timestamp", con.timestamp, "Snapshot time (default: first)");
  consensus->add_option("--fraction", con.fraction, "Snapshot fraction (default: first)");
  consensus->add_option("--strategy", con.strategy, "degree or kcore")->capture_default_str();
  consensus->add_option("--approvers", con.approvers, "Approver count (degree strategy)");
  consensus->add_option("--verifiers", con.verifiers, "Verifier count (degree strategy)");
  consensus->add_option("--tamper", con.tamper, "<id>[:<byte>] signs a corrupted payload");
  consensus->add_option("--payload", con.payload, "Payload text")->capture_default_str();
  consensus->add_option("--seed", con.seed, "Seed for node signing keys");
  consensus->add_option("--transcript", con.transcript, "Write the JSON transcript here");

  SummarizeArgs sum;
  auto* summarize = app.add_subcommand("summarize", "Fold globals.csv into summary.csv");
  summarize->add_option("--globals", sum.globals, "globals.csv")->required();
  summarize->add_option("--regime", sum.regime, "Regime label for the rows")->capture_default_str();
  summarize->add_option("--output", sum.output, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(sda::ErrorKind::Input);
  }

  try {
    if (*parse) return cmd_parse(parse_args);
    if (*simulate) return cmd_simulate(sim, *simulate);
    if (*metrics) return cmd_metrics(met);
    if (*consensus) return cmd_consensus(con, *consensus);
    if (*summarize) return cmd_summarize(sum);
  } catch (const sda::TleParseError& e) {
    std::cerr << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const sda::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return static_cast<int>(sda::ErrorKind::Invariant);
  }
  return 0;
}
