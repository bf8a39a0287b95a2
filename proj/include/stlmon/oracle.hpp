#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "stlmon/formula.hpp"
#include "stlmon/system.hpp"
#include "stlmon/tree.hpp"
#include "stlmon/vectors.hpp"

namespace stlmon {

/// Ground-truth reference implementations, deliberately naive: direct STL
/// semantics over complete cell trajectories and exhaustive classification
/// of prefixes over all input sequences. Nothing here reuses the
/// three-valued induction machinery, so agreement between the two is a
/// meaningful check rather than a tautology.

using Trajectory = std::vector<int>;  // grid cells

namespace detail {

inline int traj_cell(const Trajectory& traj, int t) {
  if (t < 0 || static_cast<size_t>(t) >= traj.size())
    throw TrajectoryTooShort("trajectory has no state at time " + std::to_string(t));
  return traj[static_cast<size_t>(t)];
}

}  // namespace detail

/// Standard Boolean semantics of a surface formula (with F, U, U') at time t
/// of a complete trajectory. Predicates are evaluated at cell centers.
inline bool eval_surface(const SurfaceFormula& f, const Trajectory& traj, int t,
                         const std::map<std::string, Predicate>& preds, const GridSpec& grid) {
  using Kind = SurfaceFormula::Kind;
  switch (f.kind) {
    case Kind::True:
      return true;
    case Kind::Pred: {
      auto it = preds.find(f.pred);
      if (it == preds.end()) throw UnknownPredicate("undeclared predicate '" + f.pred + "'");
      return it->second.holds(grid.center(detail::traj_cell(traj, t)));
    }
    case Kind::Not:
      return !eval_surface(f.children[0], traj, t, preds, grid);
    case Kind::And: {
      for (const auto& c : f.children)
        if (!eval_surface(c, traj, t, preds, grid)) return false;
      return true;
    }
    case Kind::Or: {
      for (const auto& c : f.children)
        if (eval_surface(c, traj, t, preds, grid)) return true;
      return false;
    }
    case Kind::Implies:
      return !eval_surface(f.children[0], traj, t, preds, grid) ||
             eval_surface(f.children[1], traj, t, preds, grid);
    case Kind::Eventually: {
      for (int d = f.window.lo; d <= f.window.hi; ++d)
        if (eval_surface(f.children[0], traj, t + d, preds, grid)) return true;
      return false;
    }
    case Kind::Always: {
      for (int d = f.window.lo; d <= f.window.hi; ++d)
        if (!eval_surface(f.children[0], traj, t + d, preds, grid)) return false;
      return true;
    }
    case Kind::Until: {
      // witness at t+d, left obligation from t (not t+a)
      for (int d = f.window.lo; d <= f.window.hi; ++d) {
        if (!eval_surface(f.children[1], traj, t + d, preds, grid)) continue;
        bool left_ok = true;
        for (int u = 0; u <= d && left_ok; ++u)
          left_ok = eval_surface(f.children[0], traj, t + u, preds, grid);
        if (left_ok) return true;
      }
      return false;
    }
    case Kind::UntilPrime: {
      for (int d = f.window.lo; d <= f.window.hi; ++d) {
        if (!eval_surface(f.children[1], traj, t + d, preds, grid)) continue;
        bool left_ok = true;
        for (int u = f.window.lo; u <= d && left_ok; ++u)
          left_ok = eval_surface(f.children[0], traj, t + u, preds, grid);
        if (left_ok) return true;
      }
      return false;
    }
  }
  throw Error("unreachable surface kind");
}

/// Same semantics on the subtree rooted at node v of a syntax tree.
inline bool eval_tree(const SyntaxTree& tree, int v, const Trajectory& traj, int t) {
  const TreeNode& n = tree.node(v);
  switch (n.kind) {
    case NodeKind::Region:
      return n.region.test(detail::traj_cell(traj, t));
    case NodeKind::And: {
      for (int c : n.children)
        if (!eval_tree(tree, c, traj, t)) return false;
      return true;
    }
    case NodeKind::Always: {
      for (int d = n.window.lo; d <= n.window.hi; ++d)
        if (!eval_tree(tree, n.children[0], traj, t + d)) return false;
      return true;
    }
    case NodeKind::UntilPrime: {
      for (int d = n.window.lo; d <= n.window.hi; ++d) {
        if (!eval_tree(tree, n.children[1], traj, t + d)) continue;
        bool left_ok = true;
        for (int u = n.window.lo; u <= d && left_ok; ++u)
          left_ok = eval_tree(tree, n.children[0], traj, t + u);
        if (left_ok) return true;
      }
      return false;
    }
  }
  throw Error("unreachable node kind");
}

inline bool eval_tree(const SyntaxTree& tree, const Trajectory& traj) {
  return eval_tree(tree, tree.root(), traj, 0);
}

// ---------------------------------------------------------------------------
// Exhaustive prefix classification
// ---------------------------------------------------------------------------

/// Truth record: one bit per (leaf, horizon instant). During the search the
/// bits for observed instants are filled from region membership; once every
/// instant is observed the formula is decided by plain Boolean recursion.
class TruthRecord {
 public:
  explicit TruthRecord(const SyntaxTree& tree) {
    offsets_.reserve(static_cast<size_t>(tree.leaf_count()));
    int total = 0;
    for (int v = 0; v < tree.leaf_count(); ++v) {
      offsets_.push_back(total);
      total += tree.node(v).horizon.length();
    }
    words_.assign(static_cast<size_t>(total + 63) / 64, 0);
  }

  void set(const SyntaxTree& tree, int leaf, int t, bool value) {
    int bit = offsets_[static_cast<size_t>(leaf)] + (t - tree.node(leaf).horizon.start);
    if (value)
      words_[static_cast<size_t>(bit) >> 6] |= 1ull << (bit & 63);
    else
      words_[static_cast<size_t>(bit) >> 6] &= ~(1ull << (bit & 63));
  }

  bool get(const SyntaxTree& tree, int leaf, int t) const {
    int bit = offsets_[static_cast<size_t>(leaf)] + (t - tree.node(leaf).horizon.start);
    return (words_[static_cast<size_t>(bit) >> 6] >> (bit & 63)) & 1ull;
  }

  /// Record membership of `cell` for every leaf active at instant t.
  void observe(const SyntaxTree& tree, int t, int cell) {
    for (int v = 0; v < tree.leaf_count(); ++v)
      if (tree.node(v).horizon.contains(t)) set(tree, v, t, tree.node(v).region.test(cell));
  }

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  std::vector<int> offsets_;
  std::vector<std::uint64_t> words_;
};

/// Boolean evaluation of a subtree against a fully observed truth record.
inline bool eval_record(const SyntaxTree& tree, const TruthRecord& rec, int v, int t) {
  const TreeNode& n = tree.node(v);
  switch (n.kind) {
    case NodeKind::Region:
      return rec.get(tree, v, t);
    case NodeKind::And: {
      for (int c : n.children)
        if (!eval_record(tree, rec, c, t)) return false;
      return true;
    }
    case NodeKind::Always: {
      for (int d = n.window.lo; d <= n.window.hi; ++d)
        if (!eval_record(tree, rec, n.children[0], t + d)) return false;
      return true;
    }
    case NodeKind::UntilPrime: {
      for (int d = n.window.lo; d <= n.window.hi; ++d) {
        if (!eval_record(tree, rec, n.children[1], t + d)) continue;
        bool left_ok = true;
        for (int u = n.window.lo; u <= d && left_ok; ++u)
          left_ok = eval_record(tree, rec, n.children[0], t + u);
        if (left_ok) return true;
      }
      return false;
    }
  }
  throw Error("unreachable node kind");
}

enum class PrefixClass { Violated, Feasible };

/// Depth-first search over input sequences, memoized on (time, cell, record).
/// The result of a suffix search depends on exactly that triple: the final
/// record is the current one plus bits contributed by the remaining path.
class OracleSearch {
 public:
  OracleSearch(const SystemModel& model, const SyntaxTree& tree, int T,
               std::uint64_t budget = 10'000'000)
      : model_(model), tree_(tree), T_(T), budget_(budget) {
    if (T_ < tree_.formula_horizon())
      throw HorizonError("operation horizon " + std::to_string(T_) +
                         " is below the formula horizon " +
                         std::to_string(tree_.formula_horizon()));
  }

  /// True iff some in-domain input sequence from `cell` (the state observed
  /// at time `next_t - 1`, already folded into rec) completes the record so
  /// the formula holds.
  bool feasible_from(int cell, int next_t, const TruthRecord& rec) {
    if (next_t == T_ + 2) throw HorizonError("search past the operation horizon");
    if (next_t == T_ + 1) return eval_record(tree_, rec, tree_.root(), 0);

    std::string key = make_key(cell, next_t, rec);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    if (++expansions_ > budget_)
      throw ResourceLimit("oracle search exceeded its expansion budget");

    bool ok = false;
    for (int u = 0; u < model_.input_count() && !ok; ++u) {
      int succ = model_.next(cell, u);
      if (succ == SystemModel::kOutOfDomain) continue;
      TruthRecord next = rec;
      next.observe(tree_, next_t, succ);
      ok = feasible_from(succ, next_t + 1, next);
    }
    memo_.emplace(std::move(key), ok);
    return ok;
  }

  std::uint64_t expansions() const { return expansions_; }

 private:
  std::string make_key(int cell, int next_t, const TruthRecord& rec) const {
    std::string key;
    key.reserve(8 + rec.words().size() * 8);
    auto push32 = [&key](std::uint32_t v) {
      for (int i = 0; i < 4; ++i) key.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
    };
    push32(static_cast<std::uint32_t>(cell));
    push32(static_cast<std::uint32_t>(next_t));
    for (std::uint64_t w : rec.words())
      for (int i = 0; i < 8; ++i) key.push_back(static_cast<char>((w >> (8 * i)) & 0xff));
    return key;
  }

  const SystemModel& model_;
  const SyntaxTree& tree_;
  int T_;
  std::uint64_t budget_;
  std::uint64_t expansions_ = 0;
  std::unordered_map<std::string, bool> memo_;
};

/// Classify a dynamics-consistent prefix: feasible iff some input sequence
/// u_{k:T-1} extends it into a trajectory satisfying the formula.
inline PrefixClass classify_prefix(const SystemModel& model, const SyntaxTree& tree,
                                   const Trajectory& prefix, int T,
                                   std::uint64_t budget = 10'000'000) {
  if (prefix.empty()) throw TrajectoryTooShort("prefix must contain at least one state");
  if (static_cast<int>(prefix.size()) > T + 1)
    throw HorizonError("prefix longer than the operation horizon");
  TruthRecord rec(tree);
  for (size_t t = 0; t < prefix.size(); ++t)
    rec.observe(tree, static_cast<int>(t), prefix[t]);
  OracleSearch search(model, tree, T, budget);
  return search.feasible_from(prefix.back(), static_cast<int>(prefix.size()), rec)
             ? PrefixClass::Feasible
             : PrefixClass::Violated;
}

/// Reference feasible set: cells from which, given the history recorded in I,
/// some input sequence completes the task. Defined for I valid at instant k
/// with determined past entries.
inline StateSet oracle_feasible_cells(const SystemModel& model, const SyntaxTree& tree, int k,
                                      const BasicSet& I, int T,
                                      std::uint64_t budget = 10'000'000) {
  TruthRecord base(tree);
  for (int v = 0; v < tree.leaf_count(); ++v) {
    const Horizon& h = tree.node(v).horizon;
    for (int t = h.start; t <= h.end && t < k; ++t) {
      Status s = I.vectors[static_cast<size_t>(v)].at(t);
      if (s == Status::Unknown)
        throw Error("basic set has an unknown entry in the past at node " + std::to_string(v));
      base.set(tree, v, t, s == Status::Sat);
    }
  }
  OracleSearch search(model, tree, T, budget);
  StateSet out(model.grid().cell_count());
  for (int c = 0; c < model.grid().cell_count(); ++c) {
    TruthRecord rec = base;
    rec.observe(tree, k, c);
    if (search.feasible_from(c, k + 1, rec)) out.set(c);
  }
  return out;
}

}  // namespace stlmon
