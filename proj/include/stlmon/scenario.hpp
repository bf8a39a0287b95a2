#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stlmon/feasible.hpp"
#include "stlmon/formula.hpp"
#include "stlmon/monitor.hpp"
#include "stlmon/oracle.hpp"
#include "stlmon/system.hpp"
#include "stlmon/tree.hpp"

namespace stlmon {

/// One scenario document: model, predicate declarations, formula text,
/// horizon, and an optional trajectory to monitor.
struct Scenario {
  std::string name;

  std::string model_kind;  // "thermal1d" | "robot2d" | "affine"
  GridSpec grid;
  std::vector<std::vector<double>> inputs;
  double tau = 1.0;
  ThermalParams thermal;               // thermal1d
  std::vector<double> A, B;            // affine, row-major
  std::map<std::string, Predicate> predicates;
  std::string formula_text;
  int horizon = 0;
  double sampling_period = 1.0;  // seconds per step, display only

  std::vector<std::vector<double>> trajectory;

  std::string table_path;
  std::string verdicts_path;
  std::string csv_path;
};

namespace detail {

inline std::vector<std::vector<double>> cartesian_inputs(
    const std::vector<std::vector<double>>& per_dim) {
  std::vector<std::vector<double>> out{{}};
  for (const auto& values : per_dim) {
    std::vector<std::vector<double>> next;
    next.reserve(out.size() * values.size());
    for (const auto& prefix : out) {
      for (double v : values) {
        auto item = prefix;
        item.push_back(v);
        next.push_back(std::move(item));
      }
    }
    out = std::move(next);
  }
  return out;
}

inline Predicate parse_predicate(const nlohmann::json& j) {
  if (j.contains("box")) {
    std::vector<std::optional<std::array<double, 2>>> box;
    for (const auto& dim : j["box"]) {
      if (dim.is_null()) {
        box.push_back(std::nullopt);
      } else {
        if (!dim.is_array() || dim.size() != 2)
          throw ConfigError("box predicate dimension must be [lo, hi] or null");
        box.push_back(std::array<double, 2>{dim[0].get<double>(), dim[1].get<double>()});
      }
    }
    return Predicate::make_box(std::move(box));
  }
  if (j.contains("linear")) {
    const auto& lin = j["linear"];
    if (!lin.contains("c") || !lin.contains("d"))
      throw ConfigError("linear predicate needs coefficient vector c and offset d");
    return Predicate::make_linear(lin["c"].get<std::vector<double>>(), lin["d"].get<double>());
  }
  throw ConfigError("predicate must declare either a box or a linear constraint");
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& doc) {
  Scenario s;
  s.name = doc.value("name", "scenario");
  if (!doc.contains("model")) throw ConfigError("scenario is missing the model section");
  const auto& m = doc["model"];
  s.model_kind = m.value("kind", "");
  if (s.model_kind.empty()) throw ConfigError("model needs a kind");

  if (!m.contains("bounds") || !m.contains("cells"))
    throw ConfigError("model needs bounds and cells");
  std::vector<GridDim> dims;
  const auto& bounds = m["bounds"];
  const auto& cells = m["cells"];
  if (bounds.size() != cells.size())
    throw ConfigError("bounds and cells must have the same number of dimensions");
  for (size_t d = 0; d < bounds.size(); ++d) {
    if (!bounds[d].is_array() || bounds[d].size() != 2)
      throw ConfigError("each bounds entry must be [lo, hi]");
    dims.push_back(GridDim{bounds[d][0].get<double>(), bounds[d][1].get<double>(),
                           cells[d].get<int>()});
  }
  s.grid = GridSpec(std::move(dims));

  if (m.contains("inputs")) {
    for (const auto& u : m["inputs"]) s.inputs.push_back(u.get<std::vector<double>>());
  } else if (m.contains("input_grid")) {
    std::vector<std::vector<double>> per_dim;
    for (const auto& vals : m["input_grid"]) per_dim.push_back(vals.get<std::vector<double>>());
    s.inputs = detail::cartesian_inputs(per_dim);
  } else {
    throw ConfigError("model needs inputs or input_grid");
  }

  s.tau = m.value("tau", 1.0);
  if (m.contains("params")) {
    const auto& p = m["params"];
    s.thermal.heater_temp = p.value("T_h", s.thermal.heater_temp);
    s.thermal.ambient_temp = p.value("T_e", s.thermal.ambient_temp);
    s.thermal.alpha_env = p.value("alpha_e", s.thermal.alpha_env);
    s.thermal.alpha_heater = p.value("alpha_H", s.thermal.alpha_heater);
    s.thermal.tau = s.tau;
  } else {
    s.thermal.tau = s.tau;
  }
  if (m.contains("A")) {
    for (const auto& row : m["A"])
      for (const auto& v : row) s.A.push_back(v.get<double>());
  }
  if (m.contains("B")) {
    for (const auto& row : m["B"])
      for (const auto& v : row) s.B.push_back(v.get<double>());
  }

  if (doc.contains("predicates")) {
    for (const auto& [name, body] : doc["predicates"].items())
      s.predicates.emplace(name, detail::parse_predicate(body));
  }
  if (!doc.contains("formula")) throw ConfigError("scenario is missing the formula");
  s.formula_text = doc["formula"].get<std::string>();
  if (!doc.contains("horizon")) throw ConfigError("scenario is missing the horizon");
  s.horizon = doc["horizon"].get<int>();
  s.sampling_period = doc.value("sampling_period", 1.0);

  if (doc.contains("trajectory")) {
    for (const auto& x : doc["trajectory"]) s.trajectory.push_back(x.get<std::vector<double>>());
  }
  if (doc.contains("trajectory_file")) {
    std::ifstream in(doc["trajectory_file"].get<std::string>());
    if (!in) throw ConfigError("cannot open trajectory file");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<double> x;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) x.push_back(std::stod(field));
      s.trajectory.push_back(std::move(x));
    }
  }

  if (doc.contains("outputs")) {
    const auto& o = doc["outputs"];
    s.table_path = o.value("table", "");
    s.verdicts_path = o.value("verdicts", "");
    s.csv_path = o.value("csv", "");
  }
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("scenario file " + path + " is not valid JSON: " + e.what());
  }
  return parse_scenario(doc);
}

struct CompiledScenario {
  SystemModel model;
  SurfaceFormula surface;
  SyntaxTree tree;
  int T = 0;
};

inline SystemModel build_scenario_model(const Scenario& s) {
  if (s.model_kind == "thermal1d") return make_thermal(s.grid, s.inputs, s.thermal);
  if (s.model_kind == "robot2d") return make_robot(s.grid, s.inputs, s.tau);
  if (s.model_kind == "affine") return make_affine(s.grid, s.inputs, s.A, s.B, s.tau);
  throw ConfigError("unknown model kind '" + s.model_kind + "'");
}

inline CompiledScenario compile(const Scenario& s) {
  SystemModel model = build_scenario_model(s);
  std::set<std::string> names;
  for (const auto& [name, pred] : s.predicates) {
    if (pred.dim() != s.grid.dim())
      throw DimensionMismatch("predicate '" + name + "' has dimension " +
                              std::to_string(pred.dim()) + ", grid has " +
                              std::to_string(s.grid.dim()));
    names.insert(name);
  }
  SurfaceFormula surface = parse_formula(s.formula_text, names);
  CoreFormula core = desugar(to_nnf(surface), s.predicates, s.grid);
  SyntaxTree tree = SyntaxTree::build(core);
  if (s.horizon < tree.formula_horizon())
    throw ConfigError("scenario horizon " + std::to_string(s.horizon) +
                      " is below the formula horizon " +
                      std::to_string(tree.formula_horizon()));
  return CompiledScenario{std::move(model), std::move(surface), std::move(tree), s.horizon};
}

// ---------------------------------------------------------------------------
// Offline table build
// ---------------------------------------------------------------------------

struct OfflineResult {
  std::string artifact;  // serialized feasible-set table
  std::string summary;
  std::size_t basic_sets = 0;
};

inline OfflineResult run_offline(const Scenario& s) {
  auto started = std::chrono::steady_clock::now();
  CompiledScenario cs = compile(s);
  FeasibleTable table(cs.T);
  table.precompute_all(cs.tree, cs.model);
  OfflineResult out;
  out.artifact = table.save(cs.tree, cs.model);
  out.basic_sets = table.size();

  // cells-per-set summary over the stored sets
  nlohmann::json doc = nlohmann::json::parse(out.artifact);
  int min_cells = cs.model.grid().cell_count(), max_cells = 0;
  long long total = 0;
  for (const auto& entry : doc["entries"]) {
    StateSet set = StateSet::from_hex(cs.model.grid().cell_count(), entry.at(1).get<std::string>());
    int n = set.count();
    min_cells = std::min(min_cells, n);
    max_cells = std::max(max_cells, n);
    total += n;
  }
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - started)
                .count();
  std::string sum;
  sum += "scenario: " + s.name + "\n";
  sum += "grid cells: " + std::to_string(cs.model.grid().cell_count()) + "\n";
  sum += "horizon T: " + std::to_string(cs.T) + " (" +
         fmt_double(cs.T * s.sampling_period) + " s)\n";
  sum += "basic sets stored: " + std::to_string(out.basic_sets) + "\n";
  if (out.basic_sets > 0) {
    sum += "cells per set: min " + std::to_string(min_cells) + ", mean " +
           std::to_string(total / static_cast<long long>(out.basic_sets)) + ", max " +
           std::to_string(max_cells) + "\n";
  }
  sum += "wall time: " + std::to_string(ms) + " ms\n";
  out.summary = std::move(sum);
  return out;
}

// ---------------------------------------------------------------------------
// Monitoring run
// ---------------------------------------------------------------------------

struct MonitorRunResult {
  std::string verdict_log;
  std::string csv;
  MonitorStatus final_status = MonitorStatus::Running;
  int exit_code = 0;
};

/// Stream the scenario trajectory through a monitor. When an artifact is
/// given the table is preloaded from it; missing entries are still computed
/// lazily, so both paths produce identical verdicts.
inline MonitorRunResult run_monitor(const Scenario& s, const std::string* artifact = nullptr) {
  CompiledScenario cs = compile(s);
  if (s.trajectory.empty()) throw ConfigError("scenario has no trajectory to monitor");
  FeasibleTable table = artifact ? FeasibleTable::load(*artifact, cs.tree, cs.model)
                                 : FeasibleTable(cs.T);
  if (table.horizon() != cs.T)
    throw ConfigError("feasible-set artifact horizon " + std::to_string(table.horizon()) +
                      " does not match the scenario horizon " + std::to_string(cs.T));
  Monitor monitor(cs.tree, cs.model, table);

  MonitorRunResult out;
  std::string csv = "k";
  for (int d = 0; d < cs.model.grid().dim(); ++d) csv += ",x" + std::to_string(d);
  csv += ",verdict,in_feasible_set\n";

  size_t fed = 0;
  for (const auto& x : s.trajectory) {
    if (monitor.status() != MonitorStatus::Running) break;
    Verdict v = monitor.observe(x);
    const VerdictRecord& rec = monitor.log().back();
    out.verdict_log += rec.line() + "\n";
    csv += std::to_string(rec.k);
    for (double c : rec.state) csv += "," + fmt_double(c);
    csv += std::string(",") + to_string(v) + "," + (v == Verdict::Vio ? "0" : "1") + "\n";
    ++fed;
  }
  if (fed < s.trajectory.size())
    out.verdict_log += "# concluded; " + std::to_string(s.trajectory.size() - fed) +
                       " observation(s) ignored\n";
  out.csv = std::move(csv);
  out.final_status = monitor.status();
  out.exit_code = monitor.status() == MonitorStatus::ConcludedVio ? 2 : 0;
  return out;
}

// ---------------------------------------------------------------------------
// Property-test suite generation
// ---------------------------------------------------------------------------

/// A generated random instance: small contractive affine model (never any
/// dead cells), a few box/linear predicates, and a nested formula whose
/// horizon stays small enough for exhaustive oracles.
struct GeneratedCase {
  std::string name;
  SystemModel model;
  std::map<std::string, Predicate> predicates;
  SurfaceFormula formula;
  SyntaxTree tree;
  int T = 0;
};

class PropertySuite {
 public:
  explicit PropertySuite(std::uint64_t seed, int max_depth = 3)
      : rng_(seed), max_depth_(max_depth) {}

  GeneratedCase next_case() {
    const int index = count_++;
    const int dim = pick(1, 2) == 1 ? 1 : 2;
    const double L = pick(3, 6);
    std::vector<GridDim> dims;
    for (int d = 0; d < dim; ++d)
      dims.push_back(GridDim{-L, L, dim == 1 ? pick(20, 50) : pick(5, 13)});
    GridSpec grid(std::move(dims));

    // Contractive row sums keep the zero input in-domain from every cell.
    std::vector<double> A(static_cast<size_t>(dim * dim), 0.0);
    for (int i = 0; i < dim; ++i) {
      A[static_cast<size_t>(i * dim + i)] = 0.05 * pick(12, 17);  // 0.60 .. 0.85
      for (int j = 0; j < dim; ++j)
        if (i != j) A[static_cast<size_t>(i * dim + j)] = 0.05 * pick(-2, 2);
    }
    std::vector<double> B(static_cast<size_t>(dim * dim), 0.0);
    for (int i = 0; i < dim; ++i) B[static_cast<size_t>(i * dim + i)] = 0.25 * pick(2, 6);

    std::vector<std::vector<double>> inputs;
    inputs.push_back(std::vector<double>(static_cast<size_t>(dim), 0.0));
    const int extra = pick(1, 4);
    for (int i = 0; i < extra; ++i) {
      std::vector<double> u;
      for (int d = 0; d < dim; ++d) u.push_back(0.25 * pick(-6, 6));
      inputs.push_back(std::move(u));
    }
    SystemModel model = make_affine(grid, inputs, A, B, 1.0);

    std::map<std::string, Predicate> preds;
    const int npreds = pick(2, 3);
    for (int p = 0; p < npreds; ++p) {
      std::string name = "p" + std::to_string(p);
      if (pick(0, 4) == 0) {
        std::vector<double> c;
        for (int d = 0; d < dim; ++d) c.push_back(0.5 * pick(-2, 2));
        if (std::all_of(c.begin(), c.end(), [](double v) { return v == 0.0; })) c[0] = 1.0;
        preds.emplace(name, Predicate::make_linear(std::move(c), 0.5 * pick(-4, 4)));
      } else {
        std::vector<std::optional<std::array<double, 2>>> box;
        for (int d = 0; d < dim; ++d) {
          double lo = -L + 0.5 * pick(0, static_cast<int>(2 * L));
          double hi = lo + 0.5 * pick(1, static_cast<int>(2 * L));
          box.push_back(std::array<double, 2>{lo, std::min(hi, L)});
        }
        preds.emplace(name, Predicate::make_box(std::move(box)));
      }
    }

    // Resample until the nested horizon is small enough for brute force.
    SurfaceFormula formula;
    SyntaxTree tree;
    for (;;) {
      formula = gen_formula(pick(1, max_depth_), npreds);
      try {
        CoreFormula core = desugar(to_nnf(formula), preds, grid);
        tree = SyntaxTree::build(core);
      } catch (const FragmentError&) {
        continue;
      }
      if (tree.formula_horizon() <= 6) break;
    }
    const int T = tree.formula_horizon() + pick(0, 2);

    GeneratedCase out{"case" + std::to_string(index), std::move(model), std::move(preds),
                      std::move(formula), std::move(tree), T};
    return out;
  }

  /// Dynamics-consistent random walk of cells, length T+1, via the
  /// transition table (dead ends cannot happen with these models).
  Trajectory random_walk(const SystemModel& model, int T) {
    Trajectory traj;
    int cell = pick(0, model.grid().cell_count() - 1);
    traj.push_back(cell);
    for (int k = 0; k < T; ++k) {
      int u = pick(0, model.input_count() - 1);
      int next = model.next(cell, u);
      for (int tries = 0; next == SystemModel::kOutOfDomain; ++tries) {
        u = (u + 1) % model.input_count();
        next = model.next(cell, u);
        if (tries > model.input_count()) throw Error("dead cell in generated model");
      }
      cell = next;
      traj.push_back(cell);
    }
    return traj;
  }

  /// Uniform random cells, not dynamics-consistent; for pure semantics checks.
  Trajectory random_cells(const SystemModel& model, int length) {
    Trajectory traj;
    for (int i = 0; i < length; ++i) traj.push_back(pick(0, model.grid().cell_count() - 1));
    return traj;
  }

  int pick(int lo, int hi) {
    return lo + static_cast<int>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  SurfaceFormula gen_formula(int depth, int npreds) {
    if (depth == 0) return gen_bool(2, npreds);
    switch (pick(0, 5)) {
      case 0:
        return SurfaceFormula::always(gen_interval(), gen_formula(depth - 1, npreds));
      case 1:
        return SurfaceFormula::eventually(gen_interval(), gen_formula(depth - 1, npreds));
      case 2:
        return SurfaceFormula::until(gen_interval(), gen_formula(depth - 1, npreds),
                                     gen_formula(depth - 1, npreds));
      case 3:
        return SurfaceFormula::until_prime(gen_interval(), gen_formula(depth - 1, npreds),
                                           gen_formula(depth - 1, npreds));
      case 4: {
        std::vector<SurfaceFormula> cs;
        cs.push_back(gen_formula(depth - 1, npreds));
        cs.push_back(gen_formula(depth - 1, npreds));
        return SurfaceFormula::make_and(std::move(cs));
      }
      default:
        return gen_bool(2, npreds);
    }
  }

  SurfaceFormula gen_bool(int depth, int npreds) {
    if (depth == 0 || pick(0, 2) == 0) {
      if (pick(0, 9) == 0) return SurfaceFormula::make_true();
      return SurfaceFormula::make_pred("p" + std::to_string(pick(0, npreds - 1)));
    }
    switch (pick(0, 2)) {
      case 0:
        return SurfaceFormula::make_not(gen_bool(depth - 1, npreds));
      case 1: {
        std::vector<SurfaceFormula> cs;
        cs.push_back(gen_bool(depth - 1, npreds));
        cs.push_back(gen_bool(depth - 1, npreds));
        return SurfaceFormula::make_and(std::move(cs));
      }
      default: {
        std::vector<SurfaceFormula> cs;
        cs.push_back(gen_bool(depth - 1, npreds));
        cs.push_back(gen_bool(depth - 1, npreds));
        return SurfaceFormula::make_or(std::move(cs));
      }
    }
  }

  Interval gen_interval() {
    int a = pick(0, 3);
    return Interval{a, std::min(a + pick(0, 3), 6)};
  }

  std::mt19937_64 rng_;
  int max_depth_ = 3;
  int count_ = 0;
};

/// Deterministic JSON rendering of a generated batch; byte-identical for a
/// given seed and count.
inline std::string suite_to_json(std::uint64_t seed, int count) {
  PropertySuite suite(seed);
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < count; ++i) {
    GeneratedCase c = suite.next_case();
    nlohmann::json j;
    j["name"] = c.name;
    j["model"] = c.model.describe();
    j["formula"] = c.formula.to_text();
    j["T"] = c.T;
    j["formula_hash"] = hash_hex(c.tree.hash());
    arr.push_back(std::move(j));
  }
  nlohmann::json doc;
  doc["seed"] = seed;
  doc["count"] = count;
  doc["cases"] = std::move(arr);
  return doc.dump(2) + "\n";
}

/// Fold a cell trajectory through the online update and compare every
/// determined induced entry (and the root) against the direct-semantics
/// oracle. Returns the number of disagreements; zero is the expected value.
struct EquivalenceReport {
  std::size_t entries_checked = 0;
  std::size_t mismatches = 0;
};

inline EquivalenceReport check_semantics_equivalence(const GeneratedCase& c,
                                                     const Trajectory& traj) {
  EquivalenceReport rep;
  const SyntaxTree& tree = c.tree;
  BasicSet I = init_basic(tree);
  for (int cell : traj) I = update_cell(tree, I, cell);
  InducedSet ind = induce(tree, I);

  for (int v = 0; v < tree.size(); ++v) {
    const SatVector& vec = tree.is_leaf(v) ? I.vectors[static_cast<size_t>(v)] : ind.of(v);
    const Horizon& h = tree.node(v).horizon;
    for (int t = h.start; t <= h.end; ++t) {
      Status s = vec.at(t);
      if (s == Status::Unknown) continue;
      ++rep.entries_checked;
      bool truth = eval_tree(tree, v, traj, t);
      if (truth != (s == Status::Sat)) ++rep.mismatches;
    }
  }

  // Root against the surface formula closes the loop over the desugaring.
  bool surface_truth = eval_surface(c.formula, traj, 0, c.predicates, c.model.grid());
  ++rep.entries_checked;
  if (surface_truth != (root_status(tree, I) == Status::Sat)) ++rep.mismatches;
  return rep;
}

}  // namespace stlmon
