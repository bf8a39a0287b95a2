#pragma once

#include <cassert>
#include <span>
#include <string>
#include <vector>

#include "stlmon/tree.hpp"

namespace stlmon {

/// Three-valued satisfaction status of a node at one time step.
enum class Status : unsigned char { Vio = 0, Sat = 1, Unknown = 2 };

inline char to_char(Status s) {
  switch (s) {
    case Status::Vio: return '0';
    case Status::Sat: return '1';
    case Status::Unknown: return '?';
  }
  return '?';
}

/// Per-node status over its evaluation horizon, indexed by absolute time.
struct SatVector {
  int node = -1;
  Horizon horizon;
  std::vector<Status> entries;

  Status at(int t) const {
    assert(horizon.contains(t));
    return entries[static_cast<size_t>(t - horizon.start)];
  }
  void set(int t, Status s) {
    assert(horizon.contains(t));
    entries[static_cast<size_t>(t - horizon.start)] = s;
  }
};

/// Satisfaction vectors of all region leaves plus the time step they are
/// valid for. This tuple is the monitor's entire formula-progress state:
/// determined entries for past instants, unknown for the current one onward.
struct BasicSet {
  int k = 0;
  std::vector<SatVector> vectors;  // index = leaf node id

  bool operator==(const BasicSet& o) const {
    if (k != o.k || vectors.size() != o.vectors.size()) return false;
    for (size_t i = 0; i < vectors.size(); ++i)
      if (vectors[i].entries != o.vectors[i].entries) return false;
    return true;
  }

  /// Canonical text form "k|entries|entries|...", entry chars in {0,1,?}.
  std::string encode() const {
    std::string out = std::to_string(k);
    for (const auto& v : vectors) {
      out += '|';
      for (Status s : v.entries) out += to_char(s);
    }
    return out;
  }
};

inline BasicSet init_basic(const SyntaxTree& t) {
  BasicSet I;
  I.k = 0;
  I.vectors.reserve(static_cast<size_t>(t.leaf_count()));
  for (int v = 0; v < t.leaf_count(); ++v) {
    SatVector sv;
    sv.node = v;
    sv.horizon = t.node(v).horizon;
    sv.entries.assign(static_cast<size_t>(sv.horizon.length()), Status::Unknown);
    I.vectors.push_back(std::move(sv));
  }
  return I;
}

/// Observation update: resolve entry t = I.k of every leaf whose horizon
/// contains it from region membership of the observed cell; everything else
/// is copied unchanged and the result is valid for k+1.
inline BasicSet update_cell(const SyntaxTree& t, const BasicSet& I, int cell) {
  BasicSet out = I;
  const int k = I.k;
  for (int v = 0; v < t.leaf_count(); ++v) {
    if (!t.node(v).horizon.contains(k)) continue;
    out.vectors[static_cast<size_t>(v)].set(
        k, t.node(v).region.test(cell) ? Status::Sat : Status::Vio);
  }
  out.k = k + 1;
  return out;
}

inline BasicSet update(const SyntaxTree& t, const GridSpec& grid, const BasicSet& I,
                       std::span<const double> x) {
  auto cell = grid.cell_of(x);
  if (!cell) throw OutOfDomain("observed state outside the state bounds");
  return update_cell(t, I, *cell);
}

/// Satisfaction vectors of the internal nodes, computed bottom-up from a
/// basic set. Kept separate from BasicSet since they carry no information
/// of their own.
struct InducedSet {
  int first_node = 0;  // leaf_count of the tree
  std::vector<SatVector> vectors;

  const SatVector& of(int node) const {
    return vectors[static_cast<size_t>(node - first_node)];
  }
};

namespace detail {

inline const SatVector& vector_of(const SyntaxTree& t, const BasicSet& I, const InducedSet& ind,
                                  int node) {
  return t.is_leaf(node) ? I.vectors[static_cast<size_t>(node)] : ind.of(node);
}

}  // namespace detail

/// Bottom-up three-valued evaluation of all internal nodes.
///
/// And: Vio if some child is Vio at t, Sat if all are Sat, else Unknown.
/// G[a,b]: over child entries t+a..t+b, Vio if any Vio, Sat if all Sat.
/// U'[a,b]: Sat if some t' in [a,b] has right Sat at t+t' and left Sat on
/// all of [t+a, t+t']; Vio if every such t' is refuted (right Vio at t+t'
/// or left Vio somewhere in [t+a, t+t']); else Unknown. Both directions
/// coincide with quantifying over all completions of the unknown entries.
inline InducedSet induce(const SyntaxTree& t, const BasicSet& I) {
  InducedSet ind;
  ind.first_node = t.leaf_count();
  ind.vectors.resize(static_cast<size_t>(t.size() - t.leaf_count()));
  // Internal nodes are preordered, so iterating backward sees children first.
  for (int v = t.size() - 1; v >= t.leaf_count(); --v) {
    const TreeNode& n = t.node(v);
    SatVector sv;
    sv.node = v;
    sv.horizon = n.horizon;
    sv.entries.assign(static_cast<size_t>(n.horizon.length()), Status::Unknown);
    switch (n.kind) {
      case NodeKind::And: {
        for (int t0 = n.horizon.start; t0 <= n.horizon.end; ++t0) {
          bool any_vio = false, all_sat = true;
          for (int c : n.children) {
            Status s = detail::vector_of(t, I, ind, c).at(t0);
            if (s == Status::Vio) any_vio = true;
            if (s != Status::Sat) all_sat = false;
          }
          sv.set(t0, any_vio ? Status::Vio : all_sat ? Status::Sat : Status::Unknown);
        }
        break;
      }
      case NodeKind::Always: {
        const SatVector& child = detail::vector_of(t, I, ind, n.children[0]);
        for (int t0 = n.horizon.start; t0 <= n.horizon.end; ++t0) {
          bool any_vio = false, all_sat = true;
          for (int d = n.window.lo; d <= n.window.hi; ++d) {
            Status s = child.at(t0 + d);
            if (s == Status::Vio) any_vio = true;
            if (s != Status::Sat) all_sat = false;
          }
          sv.set(t0, any_vio ? Status::Vio : all_sat ? Status::Sat : Status::Unknown);
        }
        break;
      }
      case NodeKind::UntilPrime: {
        const SatVector& left = detail::vector_of(t, I, ind, n.children[0]);
        const SatVector& right = detail::vector_of(t, I, ind, n.children[1]);
        for (int t0 = n.horizon.start; t0 <= n.horizon.end; ++t0) {
          bool witness = false;     // some fully satisfied witness time
          bool all_refuted = true;  // every witness time already fails
          bool left_all_sat = true;
          bool left_any_vio = false;
          for (int d = n.window.lo; d <= n.window.hi; ++d) {
            Status ls = left.at(t0 + d);
            if (ls != Status::Sat) left_all_sat = false;
            if (ls == Status::Vio) left_any_vio = true;
            Status rs = right.at(t0 + d);
            if (rs == Status::Sat && left_all_sat) witness = true;
            if (!(rs == Status::Vio || left_any_vio)) all_refuted = false;
          }
          sv.set(t0, witness ? Status::Sat : all_refuted ? Status::Vio : Status::Unknown);
        }
        break;
      }
      case NodeKind::Region:
        break;  // unreachable: leaves are below leaf_count()
    }
    ind.vectors[static_cast<size_t>(v - t.leaf_count())] = std::move(sv);
  }
  return ind;
}

/// Status of the whole formula under basic set I (root entry at time 0).
inline Status root_status(const SyntaxTree& t, const BasicSet& I) {
  return induce(t, I).of(t.root()).at(0);
}

/// All candidate updates of I at instant k = I.k: every 0/1 pattern over the
/// leaves whose horizon contains k, ordered lexicographically by leaf index
/// with Sat before Vio. No feasibility filtering.
inline std::vector<BasicSet> successor_candidates(const SyntaxTree& t, const BasicSet& I) {
  const int k = I.k;
  std::vector<int> active;
  for (int v = 0; v < t.leaf_count(); ++v)
    if (t.node(v).horizon.contains(k)) active.push_back(v);

  std::vector<BasicSet> out;
  const size_t n = active.size();
  out.reserve(static_cast<size_t>(1) << n);
  for (size_t mask = 0; mask < (static_cast<size_t>(1) << n); ++mask) {
    BasicSet Is = I;
    Is.k = k + 1;
    for (size_t j = 0; j < n; ++j) {
      bool vio = (mask >> (n - 1 - j)) & 1;
      Is.vectors[static_cast<size_t>(active[j])].set(k, vio ? Status::Vio : Status::Sat);
    }
    out.push_back(std::move(Is));
  }
  return out;
}

/// Successor basic sets: candidates whose root status is not Vio.
inline std::vector<BasicSet> successors(const SyntaxTree& t, const BasicSet& I) {
  std::vector<BasicSet> out;
  for (auto& Is : successor_candidates(t, I))
    if (root_status(t, Is) != Status::Vio) out.push_back(std::move(Is));
  return out;
}

/// States that trigger the transition into successor Is at instant k: the
/// intersection over leaves of their region (entry Sat), its complement
/// (entry Vio), or the full set (k outside the leaf's horizon).
inline StateSet consistent_region(const SyntaxTree& t, const BasicSet& Is, int k) {
  const int cells = t.leaf_count() > 0 ? t.node(0).region.universe_size() : 0;
  StateSet out = StateSet::full(cells);
  for (int v = 0; v < t.leaf_count(); ++v) {
    if (!t.node(v).horizon.contains(k)) continue;
    Status s = Is.vectors[static_cast<size_t>(v)].at(k);
    assert(s != Status::Unknown);
    if (s == Status::Sat) {
      out &= t.node(v).region;
    } else {
      out.and_not(t.node(v).region);
    }
  }
  return out;
}

}  // namespace stlmon
