// Command-line front end: offline table builds, trajectory monitoring runs,
// random property-check batches, and tree dumps.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stlmon/stlmon.hpp"

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw stlmon::ConfigError("cannot write " + path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw stlmon::ConfigError("cannot read " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

int cmd_offline(const std::string& scenario_path, const std::string& table_override) {
  stlmon::Scenario s = stlmon::load_scenario(scenario_path);
  stlmon::OfflineResult result = stlmon::run_offline(s);
  std::string table_path = !table_override.empty() ? table_override : s.table_path;
  if (table_path.empty()) table_path = s.name + "_table.json";
  write_file(table_path, result.artifact);
  std::cout << result.summary << "table written to " << table_path << "\n";
  return 0;
}

int cmd_monitor(const std::string& scenario_path, const std::string& table_path) {
  stlmon::Scenario s = stlmon::load_scenario(scenario_path);
  stlmon::MonitorRunResult result;
  if (!table_path.empty()) {
    std::string artifact = read_file(table_path);
    result = stlmon::run_monitor(s, &artifact);
  } else {
    result = stlmon::run_monitor(s);
  }
  std::cout << result.verdict_log;
  if (!s.verdicts_path.empty()) write_file(s.verdicts_path, result.verdict_log);
  if (!s.csv_path.empty()) write_file(s.csv_path, result.csv);
  return result.exit_code;
}

int cmd_proptest(std::uint64_t seed, int count, const std::string& out_path) {
  stlmon::PropertySuite suite(seed);
  std::size_t entries = 0, mismatches = 0;
  for (int i = 0; i < count; ++i) {
    stlmon::GeneratedCase c = suite.next_case();
    for (int rep = 0; rep < 3; ++rep) {
      stlmon::Trajectory traj = suite.random_cells(c.model, c.T + 1);
      stlmon::EquivalenceReport rep_out = stlmon::check_semantics_equivalence(c, traj);
      entries += rep_out.entries_checked;
      mismatches += rep_out.mismatches;
    }
    std::cout << c.name << " formula=" << c.formula.to_text() << " T=" << c.T << "\n";
  }
  if (!out_path.empty()) write_file(out_path, stlmon::suite_to_json(seed, count));
  std::cout << "checked " << entries << " induced entries across " << count
            << " cases, mismatches: " << mismatches << "\n";
  return mismatches == 0 ? 0 : 1;
}

int cmd_dump_tree(const std::string& scenario_path) {
  stlmon::Scenario s = stlmon::load_scenario(scenario_path);
  stlmon::CompiledScenario cs = stlmon::compile(s);
  std::cout << cs.tree.dump();
  std::cout << "formula horizon: " << cs.tree.formula_horizon() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Model-predictive online monitor for nested STL specifications"};
  app.require_subcommand(1);

  std::string scenario_path, table_path, out_path;
  std::uint64_t seed = 1;
  int count = 20;

  auto* offline = app.add_subcommand("offline", "precompute the feasible-set table");
  offline->add_option("scenario", scenario_path, "scenario JSON file")->required();
  offline->add_option("--out", table_path, "override the table output path");

  auto* monitor = app.add_subcommand("monitor", "run the online monitor over a trajectory");
  monitor->add_option("scenario", scenario_path, "scenario JSON file")->required();
  monitor->add_option("--table", table_path, "preload a feasible-set table artifact");

  auto* proptest = app.add_subcommand("proptest", "run randomized equivalence checks");
  proptest->add_option("--seed", seed, "generator seed");
  proptest->add_option("--count", count, "number of generated cases");
  proptest->add_option("--out", out_path, "write the generated batch as JSON");

  auto* dump = app.add_subcommand("dump-tree", "print the syntax tree with horizons");
  dump->add_option("scenario", scenario_path, "scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (offline->parsed()) return cmd_offline(scenario_path, table_path);
    if (monitor->parsed()) return cmd_monitor(scenario_path, table_path);
    if (proptest->parsed()) return cmd_proptest(seed, count, out_path);
    if (dump->parsed()) return cmd_dump_tree(scenario_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
