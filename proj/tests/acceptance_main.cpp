// Acceptance suite: one checkable criterion per function, one pass/fail line
// per criterion on stdout. Run with no arguments for the full suite or with a
// criterion number to run a single one. Exit code is the number of failures.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "stlmon/stlmon.hpp"

using namespace stlmon;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

void report(int n, const char* title, const Outcome& o) {
  std::printf("[%s] criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", n, title,
              o.detail.c_str());
  std::fflush(stdout);
}

// Thermal instance used by criteria 3 and 4: cell centers at multiples of
// 0.5 (91 cells, step 0.5), comfort band [20,25], five heater settings.
struct SmallThermal {
  SystemModel model;
  std::map<std::string, Predicate> preds;
  SyntaxTree tree;
  int T;

  SmallThermal()
      : model(make_thermal(GridSpec({GridDim{-0.25, 45.25, 91}}),
                           {{0.0}, {0.25}, {0.5}, {0.75}, {1.0}})),
        preds(),
        tree(),
        T(8) {
    preds.emplace("comfort", Predicate::make_box({std::array<double, 2>{20.0, 25.0}}));
    tree = SyntaxTree::build(
        desugar(to_nnf(parse_formula("G[0,4] F[0,2] comfort")), preds, model.grid()));
  }
};

Trajectory random_walk(const SystemModel& m, std::mt19937_64& rng, int steps) {
  Trajectory traj;
  traj.push_back(static_cast<int>(rng() % static_cast<unsigned>(m.grid().cell_count())));
  for (int k = 0; k < steps; ++k) {
    int cell = traj.back();
    int u = static_cast<int>(rng() % static_cast<unsigned>(m.input_count()));
    int next = m.next(cell, u);
    for (int tries = 0; next == SystemModel::kOutOfDomain && tries <= m.input_count(); ++tries) {
      u = (u + 1) % m.input_count();
      next = m.next(cell, u);
    }
    if (next == SystemModel::kOutOfDomain) break;
    traj.push_back(next);
  }
  return traj;
}

// --- criterion 1 -----------------------------------------------------------
// Folding online updates and reading induced entries agrees with the direct
// semantics oracle on every determined entry, across >= 1000 random
// (formula, trajectory) pairs.
Outcome criterion1() {
  Timer timer;
  PropertySuite suite(1001);
  std::size_t pairs = 0, entries = 0, mismatches = 0;
  while (pairs < 1000) {
    GeneratedCase c = suite.next_case();
    for (int rep = 0; rep < 4 && pairs < 1200; ++rep) {
      Trajectory traj = suite.random_cells(c.model, c.T + 1);
      EquivalenceReport r = check_semantics_equivalence(c, traj);
      entries += r.entries_checked;
      mismatches += r.mismatches;
      ++pairs;
    }
  }
  double secs = timer.seconds();
  Outcome o;
  o.pass = mismatches == 0 && secs <= 120.0;
  o.detail = std::to_string(pairs) + " pairs, " + std::to_string(entries) + " entries, " +
             std::to_string(mismatches) + " mismatches, " + std::to_string(secs) + "s";
  return o;
}

// --- criterion 2 -----------------------------------------------------------
// Three-valued induction equals quantification over all completions of the
// unknown entries, for >= 500 random partial basic sets with <= 12 unknowns.
Outcome criterion2() {
  Timer timer;
  PropertySuite suite(2002);
  std::mt19937_64 rng(2002);
  std::size_t sets = 0, mismatches = 0;
  while (sets < 500) {
    GeneratedCase c = suite.next_case();
    std::vector<std::pair<size_t, size_t>> slots;
    {
      BasicSet probe = init_basic(c.tree);
      for (size_t v = 0; v < probe.vectors.size(); ++v)
        for (size_t e = 0; e < probe.vectors[v].entries.size(); ++e) slots.emplace_back(v, e);
    }
    for (int rep = 0; rep < 5 && sets < 520; ++rep) {
      BasicSet I = init_basic(c.tree);
      for (auto [v, e] : slots)
        I.vectors[v].entries[e] = (rng() & 1) ? Status::Sat : Status::Vio;
      size_t unknowns = std::min<size_t>(slots.size(), rng() % 13);
      for (size_t u = 0; u < unknowns; ++u) {
        auto [v, e] = slots[rng() % slots.size()];
        I.vectors[v].entries[e] = Status::Unknown;
      }
      ++sets;

      // enumerate completions once, then aggregate per node and instant
      std::vector<std::pair<size_t, size_t>> open;
      for (auto [v, e] : slots)
        if (I.vectors[v].entries[e] == Status::Unknown) open.emplace_back(v, e);
      std::vector<InducedSet> completed;
      completed.reserve(1ull << open.size());
      BasicSet work = I;
      for (std::uint64_t mask = 0; mask < (1ull << open.size()); ++mask) {
        for (size_t b = 0; b < open.size(); ++b)
          work.vectors[open[b].first].entries[open[b].second] =
              ((mask >> b) & 1) ? Status::Sat : Status::Vio;
        completed.push_back(induce(c.tree, work));
      }

      InducedSet ind = induce(c.tree, I);
      for (int v = c.tree.leaf_count(); v < c.tree.size(); ++v) {
        const Horizon& h = c.tree.node(v).horizon;
        for (int t = h.start; t <= h.end; ++t) {
          bool all_sat = true, all_vio = true;
          for (const InducedSet& done : completed) {
            Status s = done.of(v).at(t);
            if (s != Status::Sat) all_sat = false;
            if (s != Status::Vio) all_vio = false;
          }
          Status expect = all_sat ? Status::Sat : all_vio ? Status::Vio : Status::Unknown;
          if (ind.of(v).at(t) != expect) ++mismatches;
        }
      }
    }
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.detail = std::to_string(sets) + " partial sets, " + std::to_string(mismatches) +
             " mismatches, " + std::to_string(timer.seconds()) + "s";
  return o;
}

// --- criterion 3 -----------------------------------------------------------
// Monitor verdicts equal exhaustive prefix classification on the discretized
// thermal instance, over >= 200 random dynamics-consistent prefixes.
Outcome criterion3() {
  Timer timer;
  SmallThermal rig;
  FeasibleTable table(rig.T);
  OracleSearch search(rig.model, rig.tree, rig.T, 200'000'000);
  std::mt19937_64 rng(3003);

  // half the runs start anywhere, half inside the initial feasible set so
  // long feas chains and late alarms both get exercised
  StateSet x0 = table.feasible_set(rig.tree, rig.model, 0, init_basic(rig.tree));
  std::vector<int> x0_cells = x0.to_indices();

  std::size_t runs = 0, prefixes = 0, false_alarms = 0, missed_alarms = 0;
  for (int run = 0; run < 200; ++run) {
    ++runs;
    Trajectory traj = random_walk(rig.model, rng, rig.T);
    if (run % 2 == 1 && !x0_cells.empty()) {
      traj = Trajectory{x0_cells[rng() % x0_cells.size()]};
      while (static_cast<int>(traj.size()) <= rig.T) {
        int next = rig.model.next(traj.back(),
                                  static_cast<int>(rng() % static_cast<unsigned>(
                                                       rig.model.input_count())));
        if (next == SystemModel::kOutOfDomain) break;
        traj.push_back(next);
      }
    }
    Monitor monitor(rig.tree, rig.model, table);
    TruthRecord rec(rig.tree);
    Trajectory prefix;
    for (int cell : traj) {
      if (monitor.status() != MonitorStatus::Running) break;
      Verdict v = monitor.observe_cell(cell);
      prefix.push_back(cell);
      rec.observe(rig.tree, static_cast<int>(prefix.size()) - 1, cell);
      bool oracle_feasible =
          search.feasible_from(cell, static_cast<int>(prefix.size()), rec);
      ++prefixes;
      if (v == Verdict::Vio && oracle_feasible) ++false_alarms;
      if (v != Verdict::Vio && !oracle_feasible) ++missed_alarms;
    }
  }
  double secs = timer.seconds();
  Outcome o;
  o.pass = false_alarms == 0 && missed_alarms == 0 && runs >= 200 && prefixes >= 200 &&
           secs <= 300.0;
  o.detail = std::to_string(runs) + " runs, " + std::to_string(prefixes) + " prefixes, " +
             std::to_string(false_alarms) + " false alarms, " + std::to_string(missed_alarms) +
             " missed alarms, " + std::to_string(secs) + "s";
  return o;
}

// --- criterion 4 -----------------------------------------------------------
// Exact bitset equality between the backward-recursion feasible sets and the
// oracle-derived sets for every (k, I) reached along 20 random runs.
Outcome criterion4() {
  Timer timer;
  SmallThermal rig;
  FeasibleTable table(rig.T);
  std::mt19937_64 rng(4004);
  std::size_t pairs = 0, unequal = 0;
  std::set<std::string> seen;

  // runs follow the monitor: start inside the current feasible set and keep
  // picking feasible successors, so every (k, I) a run visits is recorded
  for (int run = 0; run < 20; ++run) {
    BasicSet I = init_basic(rig.tree);
    StateSet X = table.feasible_set(rig.tree, rig.model, 0, I);
    std::vector<int> cells = X.to_indices();
    if (cells.empty()) break;
    int cell = cells[rng() % cells.size()];
    for (int k = 0; k <= rig.T; ++k) {
      if (seen.insert(I.encode()).second) {
        StateSet ours = table.feasible_set(rig.tree, rig.model, k, I);
        StateSet ref = oracle_feasible_cells(rig.model, rig.tree, k, I, rig.T, 200'000'000);
        ++pairs;
        if (!(ours == ref)) ++unequal;
      }
      I = update_cell(rig.tree, I, cell);
      if (root_status(rig.tree, I) != Status::Unknown) break;
      if (k == rig.T) break;
      StateSet next = table.feasible_set(rig.tree, rig.model, k + 1, I);
      std::vector<int> live;
      for (int u = 0; u < rig.model.input_count(); ++u) {
        int succ = rig.model.next(cell, u);
        if (succ != SystemModel::kOutOfDomain && next.test(succ)) live.push_back(succ);
      }
      if (live.empty()) break;
      cell = live[rng() % live.size()];
    }
  }
  Outcome o;
  o.pass = unequal == 0 && pairs >= 20;
  o.detail = std::to_string(pairs) + " distinct (k, I) pairs, " + std::to_string(unequal) +
             " unequal sets, " + std::to_string(timer.seconds()) + "s";
  return o;
}

// --- criterion 5 -----------------------------------------------------------
// Thermal case study: one-step feasible set of the comfort band matches the
// analytic interval within one cell per endpoint, and the heater-off run
// alarms strictly before the open window's deadline expires.
Outcome criterion5() {
  Timer timer;
  SystemModel model =
      make_thermal(GridSpec({GridDim{0.0, 45.0, 90}}), {{0.0}, {0.25}, {0.5}, {0.75}, {1.0}});
  std::map<std::string, Predicate> preds;
  preds.emplace("comfort", Predicate::make_box({std::array<double, 2>{20.0, 25.0}}));
  SyntaxTree tree = SyntaxTree::build(
      desugar(to_nnf(parse_formula("G[0,10] F[0,5] comfort")), preds, model.grid()));
  const int T = 15;

  StateSet comfort = predicate_region(preds.at("comfort"), model.grid());
  StateSet pre = one_step_feasible(model, comfort);
  double lo = model.grid().center(pre.min_cell())[0];
  double hi = model.grid().center(pre.max_cell())[0];
  const double analytic_lo = 15.6 / 0.86, analytic_hi = 25.0 / 0.94;
  bool preimage_ok =
      std::abs(lo - analytic_lo) <= 0.5 && std::abs(hi - analytic_hi) <= 0.5;

  // hover below the band, dip in at steps 5..9, heater off from step 9
  std::vector<double> states{19.0,  18.75, 19.25, 18.75, 19.25, 20.75, 20.75, 20.75,
                             20.75, 20.75, 19.75, 18.75, 17.75, 16.75, 15.75, 14.75};
  FeasibleTable table(T);
  Monitor monitor(tree, model, table);
  int alarm_k = -1;
  std::size_t feas_count = 0;
  for (double x : states) {
    if (monitor.status() != MonitorStatus::Running) break;
    double obs[1] = {x};
    Verdict v = monitor.observe(obs);
    if (v == Verdict::Feas) ++feas_count;
    if (v == Verdict::Vio) alarm_k = monitor.log().back().k;
  }
  bool shape_ok = alarm_k > 0 && feas_count == static_cast<std::size_t>(alarm_k);
  // predictive: the observed prefix alone has not completed a violation, and
  // the alarm lands strictly before the horizon end
  bool predictive_ok =
      shape_ok && root_status(tree, monitor.basic()) != Status::Vio && alarm_k < T;
  // the exhaustive oracle agrees the alarm is neither early nor late
  bool oracle_ok = false;
  if (shape_ok) {
    Trajectory prefix;
    for (int k = 0; k <= alarm_k; ++k) {
      double obs[1] = {states[static_cast<size_t>(k)]};
      prefix.push_back(*model.grid().cell_of(obs));
    }
    Trajectory before(prefix.begin(), prefix.end() - 1);
    oracle_ok =
        classify_prefix(model, tree, prefix, T, 200'000'000) == PrefixClass::Violated &&
        classify_prefix(model, tree, before, T, 200'000'000) == PrefixClass::Feasible;
  }

  Outcome o;
  o.pass = preimage_ok && shape_ok && predictive_ok && oracle_ok;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "preimage [%g, %g] vs analytic [%g, %g], alarm at k=%d after %zu feas, %.2fs",
                lo, hi, analytic_lo, analytic_hi, alarm_k, feas_count, timer.seconds());
  o.detail = buf;
  return o;
}

// --- criterion 6 -----------------------------------------------------------
// Robot case study: oracle-confirmed feasible and infeasible starts get the
// matching first verdict, and idling inside the first patrol region yields
// four feas verdicts before the k=4 alarm.
Outcome criterion6() {
  Timer timer;
  std::vector<std::vector<double>> inputs;
  for (int a = -1; a <= 1; ++a)
    for (int b = -1; b <= 1; ++b) inputs.push_back({double(a), double(b)});
  SystemModel model = make_robot(GridSpec({GridDim{0, 12, 24}, GridDim{0, 12, 24}}), inputs);
  std::map<std::string, Predicate> preds;
  preds.emplace("A1", Predicate::make_box(
                          {std::array<double, 2>{3, 5}, std::array<double, 2>{3, 5}}));
  preds.emplace("A2", Predicate::make_box(
                          {std::array<double, 2>{6, 8}, std::array<double, 2>{6, 8}}));
  SyntaxTree tree = SyntaxTree::build(desugar(
      to_nnf(parse_formula("F[0,6] A1 & F[0,6] G[0,2] A2")), preds, model.grid()));
  const int T = 8;

  auto cell2 = [&](double x, double y) {
    double p[2] = {x, y};
    return *model.grid().cell_of(p);
  };
  const int inside = cell2(3.25, 3.25);
  const int corner = cell2(11.75, 0.25);

  bool inside_oracle =
      classify_prefix(model, tree, {inside}, T, 200'000'000) == PrefixClass::Feasible;
  bool corner_oracle =
      classify_prefix(model, tree, {corner}, T, 200'000'000) == PrefixClass::Violated;

  FeasibleTable table(T);
  Monitor m_in(tree, model, table);
  bool inside_feas = m_in.observe_cell(inside) == Verdict::Feas;
  Monitor m_out(tree, model, table);
  bool corner_vio = m_out.observe_cell(corner) == Verdict::Vio;

  // idle inside A1: feasible through k=3, alarm at k=4
  Monitor m_idle(tree, model, table);
  std::vector<Verdict> verdicts;
  for (int k = 0; k <= 4 && m_idle.status() == MonitorStatus::Running; ++k)
    verdicts.push_back(m_idle.observe_cell(inside));
  bool idle_ok = verdicts.size() == 5;
  for (int k = 0; k <= 3 && idle_ok; ++k) idle_ok = verdicts[static_cast<size_t>(k)] == Verdict::Feas;
  idle_ok = idle_ok && verdicts[4] == Verdict::Vio;
  Trajectory idle3(4, inside), idle4(5, inside);
  bool idle_oracle =
      classify_prefix(model, tree, idle3, T, 200'000'000) == PrefixClass::Feasible &&
      classify_prefix(model, tree, idle4, T, 200'000'000) == PrefixClass::Violated;

  Outcome o;
  o.pass = inside_oracle && corner_oracle && inside_feas && corner_vio && idle_ok && idle_oracle;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "start in X0: %s/feas, far corner: %s/vio, idle run: %s, %.2fs",
                inside_oracle ? "feasible" : "BAD", corner_oracle ? "violated" : "BAD",
                idle_ok ? "feas x4 then vio at k=4" : "WRONG SHAPE", timer.seconds());
  o.detail = buf;
  return o;
}

// --- criterion 7 -----------------------------------------------------------
// Determinism and path equivalence: offline artifact + preloaded monitor runs
// give byte-identical verdict logs to lazy runs, across repeated executions.
Outcome criterion7() {
  Timer timer;
  const char* thermal_doc = R"({
    "name": "thermal",
    "model": {"kind": "thermal1d", "bounds": [[0,45]], "cells": [90],
              "inputs": [[0],[0.25],[0.5],[0.75],[1]], "tau": 1.0,
              "params": {"T_h": 55, "T_e": 0, "alpha_e": 0.06, "alpha_H": 0.08}},
    "predicates": {"comfort": {"box": [[20,25]]}},
    "formula": "G[0,10] F[0,5] comfort",
    "horizon": 15,
    "trajectory": [[19.0],[18.75],[19.25],[18.75],[19.25],[20.75],[20.75],[20.75],
                   [20.75],[20.75],[19.75],[18.75],[17.75],[16.75],[15.75],[14.75]]
  })";
  const char* robot_doc = R"({
    "name": "robot_patrol",
    "model": {"kind": "robot2d", "bounds": [[0,12],[0,12]], "cells": [24,24],
              "input_grid": [[-1,0,1],[-1,0,1]], "tau": 1.0},
    "predicates": {"A1": {"box": [[3,5],[3,5]]}, "A2": {"box": [[6,8],[6,8]]}},
    "formula": "F[0,6] A1 & F[0,6] G[0,2] A2",
    "horizon": 8,
    "trajectory": [[2.25,2.25],[3.25,3.25],[4.25,4.25],[5.25,5.25],
                   [6.25,6.25],[6.25,6.25],[6.25,6.25]]
  })";

  bool all_ok = true;
  std::string note;
  for (const char* doc : {thermal_doc, robot_doc}) {
    Scenario s = parse_scenario(nlohmann::json::parse(doc));
    OfflineResult off1 = run_offline(s);
    OfflineResult off2 = run_offline(s);
    MonitorRunResult lazy1 = run_monitor(s);
    MonitorRunResult lazy2 = run_monitor(s);
    MonitorRunResult pre1 = run_monitor(s, &off1.artifact);
    MonitorRunResult pre2 = run_monitor(s, &off2.artifact);
    bool ok = off1.artifact == off2.artifact && lazy1.verdict_log == lazy2.verdict_log &&
              lazy1.verdict_log == pre1.verdict_log && pre1.verdict_log == pre2.verdict_log &&
              lazy1.csv == pre1.csv;
    all_ok = all_ok && ok;
    note += s.name + (ok ? " ok " : " MISMATCH ");
  }
  Outcome o;
  o.pass = all_ok;
  o.detail = note + std::to_string(timer.seconds()) + "s";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  struct Entry {
    const char* title;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {"induced entries match the direct-semantics oracle", criterion1},
      {"three-valued induction equals completion quantification", criterion2},
      {"monitor verdicts equal exhaustive prefix classification", criterion3},
      {"feasible sets equal the oracle-derived sets", criterion4},
      {"thermal case study: preimage bounds and predictive alarm", criterion5},
      {"robot case study: initial verdicts and k=4 divergence", criterion6},
      {"determinism and lazy/preloaded path equivalence", criterion7},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (int i = 0; i < 7; ++i) {
    if (only != 0 && only != i + 1) continue;
    Outcome o;
    try {
      o = entries[i].fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    report(i + 1, entries[i].title, o);
    if (!o.pass) ++failures;
  }
  return failures;
}
