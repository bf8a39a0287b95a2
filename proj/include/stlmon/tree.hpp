#pragma once

#include <string>
#include <vector>

#include "stlmon/formula.hpp"

namespace stlmon {

/// Absolute time window over which a node must be evaluated: the
/// component-wise sum of the intervals of its strict ancestors.
struct Horizon {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  bool contains(int t) const { return start <= t && t <= end; }
};

enum class NodeKind { Region, And, Always, UntilPrime };

struct TreeNode {
  NodeKind kind = NodeKind::Region;
  Interval window;            // Always/UntilPrime; [0,0] otherwise
  Horizon horizon;
  int parent = -1;
  std::vector<int> children;  // UntilPrime: children[0] = left, children[1] = right
  StateSet region;            // Region nodes only
  std::string label;          // Region nodes only
};

/// Syntax tree of a core formula. Region leaves occupy indices 0..h-1 in
/// depth-first source order; internal nodes follow in preorder, so the root
/// is index h and every internal parent precedes its internal children.
class SyntaxTree {
 public:
  static SyntaxTree build(const CoreFormula& f) {
    SyntaxTree t;
    // Two preorder passes: leaves first so basic vectors index 0..h-1,
    // then internal nodes.
    t.leaf_count_ = count_leaves(f);
    t.nodes_.resize(total_nodes(f));
    int next_leaf = 0;
    int next_internal = t.leaf_count_;
    t.root_ = t.add(f, -1, Horizon{0, 0}, next_leaf, next_internal);
    return t;
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  int leaf_count() const { return leaf_count_; }
  int root() const { return root_; }
  const TreeNode& node(int v) const { return nodes_[static_cast<size_t>(v)]; }
  bool is_leaf(int v) const { return v < leaf_count_; }

  /// Largest leaf horizon end; scenarios must run at least this long.
  int formula_horizon() const {
    int h = 0;
    for (int v = 0; v < leaf_count_; ++v) h = std::max(h, node(v).horizon.end);
    return h;
  }

  std::string dump() const {
    std::string out;
    for (int v = 0; v < size(); ++v) {
      const TreeNode& n = node(v);
      out += std::to_string(v) + ": ";
      switch (n.kind) {
        case NodeKind::Region:
          out += "H(" + n.label + ")";
          break;
        case NodeKind::And:
          out += "And";
          break;
        case NodeKind::Always:
          out += "G[" + std::to_string(n.window.lo) + "," + std::to_string(n.window.hi) + "]";
          break;
        case NodeKind::UntilPrime:
          out += "U'[" + std::to_string(n.window.lo) + "," + std::to_string(n.window.hi) + "]";
          break;
      }
      out += " horizon=[" + std::to_string(n.horizon.start) + "," +
             std::to_string(n.horizon.end) + "]";
      if (!n.children.empty()) {
        out += " children=[";
        for (size_t i = 0; i < n.children.size(); ++i) {
          if (i) out += ",";
          out += std::to_string(n.children[i]);
        }
        out += "]";
      }
      out += "\n";
    }
    return out;
  }

  /// Dump plus region contents; the basis for formula hashing.
  std::string canonical_encoding() const {
    std::string out = dump();
    for (int v = 0; v < leaf_count_; ++v)
      out += "region " + std::to_string(v) + " " + node(v).region.to_hex() + "\n";
    return out;
  }

  std::uint64_t hash() const { return fnv1a64(canonical_encoding()); }

 private:
  static int count_leaves(const CoreFormula& f) {
    if (f.kind == CoreFormula::Kind::Region) return 1;
    int n = 0;
    for (const auto& c : f.children) n += count_leaves(c);
    return n;
  }
  static int total_nodes(const CoreFormula& f) {
    int n = 1;
    for (const auto& c : f.children) n += total_nodes(c);
    return n;
  }

  int add(const CoreFormula& f, int parent, Horizon h, int& next_leaf, int& next_internal) {
    const bool leaf = f.kind == CoreFormula::Kind::Region;
    const int id = leaf ? next_leaf++ : next_internal++;
    TreeNode& n = nodes_[static_cast<size_t>(id)];
    n.parent = parent;
    n.horizon = h;
    switch (f.kind) {
      case CoreFormula::Kind::Region:
        n.kind = NodeKind::Region;
        n.region = f.region;
        n.label = f.label;
        break;
      case CoreFormula::Kind::And:
        n.kind = NodeKind::And;
        break;
      case CoreFormula::Kind::Always:
        n.kind = NodeKind::Always;
        n.window = f.window;
        break;
      case CoreFormula::Kind::UntilPrime:
        n.kind = NodeKind::UntilPrime;
        n.window = f.window;
        break;
    }
    Horizon child_h{h.start + n.window.lo, h.end + n.window.hi};
    for (const auto& c : f.children) {
      int cid = add(c, id, child_h, next_leaf, next_internal);
      nodes_[static_cast<size_t>(id)].children.push_back(cid);
    }
    return id;
  }

  std::vector<TreeNode> nodes_;
  int root_ = 0;
  int leaf_count_ = 0;
};

}  // namespace stlmon
