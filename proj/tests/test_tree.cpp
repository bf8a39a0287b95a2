#include <doctest.h>

#include "testutil.hpp"

using namespace stlmon;

namespace {

std::map<std::string, Predicate> three_preds() {
  std::map<std::string, Predicate> preds;
  preds.emplace("h1", Predicate::make_box({std::array<double, 2>{0.0, 10.0}}));
  preds.emplace("h2", Predicate::make_box({std::array<double, 2>{5.0, 20.0}}));
  preds.emplace("h3", Predicate::make_box({std::array<double, 2>{15.0, 30.0}}));
  return preds;
}

GridSpec small_grid() { return GridSpec({GridDim{0.0, 45.0, 45}}); }

// ((G[1,3] h1) U'[2,5] h2) & (G[3,7] h3)
SyntaxTree nested_example() {
  return testutil::compile_formula("((G[1,3] h1) U'[2,5] (h2)) & G[3,7] h3", three_preds(),
                                   small_grid());
}

}  // namespace

TEST_CASE("tree: structure of the nested until/always example") {
  SyntaxTree t = nested_example();
  REQUIRE(t.size() == 7);
  REQUIRE(t.leaf_count() == 3);
  REQUIRE(t.root() == 3);

  const TreeNode& root = t.node(t.root());
  CHECK(root.kind == NodeKind::And);
  REQUIRE(root.children.size() == 2);

  const TreeNode& until = t.node(root.children[0]);
  CHECK(until.kind == NodeKind::UntilPrime);
  CHECK(until.window.lo == 2);
  CHECK(until.window.hi == 5);
  const TreeNode& g13 = t.node(until.children[0]);
  CHECK(g13.kind == NodeKind::Always);
  CHECK(t.node(g13.children[0]).label == "h1");
  CHECK(t.node(until.children[1]).label == "h2");

  const TreeNode& g37 = t.node(root.children[1]);
  CHECK(g37.kind == NodeKind::Always);
  CHECK(t.node(g37.children[0]).label == "h3");
}

TEST_CASE("tree: evaluation horizons are ancestor interval sums") {
  SyntaxTree t = nested_example();
  // h1 sits under U'[2,5] then G[1,3]: horizon [2+1, 5+3] = [3,8]
  CHECK(t.node(0).horizon.start == 3);
  CHECK(t.node(0).horizon.end == 8);
  CHECK(t.node(1).horizon.start == 2);
  CHECK(t.node(1).horizon.end == 5);
  // h3 under the root and G[3,7]: [3,7]
  CHECK(t.node(2).horizon.start == 3);
  CHECK(t.node(2).horizon.end == 7);
  // root has no ancestors
  CHECK(t.node(t.root()).horizon.start == 0);
  CHECK(t.node(t.root()).horizon.end == 0);
}

TEST_CASE("tree: child horizon equals parent horizon shifted by the parent interval") {
  PropertySuite suite(99);
  for (int i = 0; i < 30; ++i) {
    GeneratedCase c = suite.next_case();
    const SyntaxTree& t = c.tree;
    for (int v = 0; v < t.size(); ++v) {
      const TreeNode& n = t.node(v);
      for (int child : n.children) {
        CHECK(t.node(child).horizon.start == n.horizon.start + n.window.lo);
        CHECK(t.node(child).horizon.end == n.horizon.end + n.window.hi);
        CHECK(t.node(child).parent == v);
      }
    }
    // leaves first, then internal nodes; exactly one root at index h
    for (int v = 0; v < t.leaf_count(); ++v) CHECK(t.node(v).kind == NodeKind::Region);
    for (int v = t.leaf_count(); v < t.size(); ++v) CHECK(t.node(v).kind != NodeKind::Region);
    CHECK(t.node(t.root()).parent == -1);
    CHECK(t.root() == t.leaf_count());
  }
}

TEST_CASE("tree: formula horizons of the case studies") {
  SyntaxTree thermal = testutil::compile_formula("G[0,10] F[0,5] comfort", testutil::thermal_preds(),
                                                 testutil::thermal_case_model().grid());
  CHECK(thermal.formula_horizon() == 15);
  // five nodes: root wrapper, G, U', top leaf, comfort leaf
  CHECK(thermal.size() == 5);
  CHECK(thermal.leaf_count() == 2);
  CHECK(thermal.node(0).horizon.start == 0);
  CHECK(thermal.node(0).horizon.end == 15);
  CHECK(thermal.node(1).horizon.end == 15);

  SyntaxTree robot = testutil::compile_formula("F[0,6] A1 & F[0,6] G[0,2] A2",
                                               testutil::robot_preds(),
                                               testutil::robot_case_model().grid());
  CHECK(robot.formula_horizon() == 8);

  SyntaxTree leaf = testutil::compile_formula("comfort", testutil::thermal_preds(),
                                              testutil::thermal_case_model().grid());
  CHECK(leaf.formula_horizon() == 0);
  CHECK(leaf.size() == 2);
}

TEST_CASE("tree: deterministic dump") {
  SyntaxTree t = nested_example();
  const std::string expect =
      "0: H(h1) horizon=[3,8]\n"
      "1: H(h2) horizon=[2,5]\n"
      "2: H(h3) horizon=[3,7]\n"
      "3: And horizon=[0,0] children=[4,6]\n"
      "4: U'[2,5] horizon=[0,0] children=[5,1]\n"
      "5: G[1,3] horizon=[2,5] children=[0]\n"
      "6: G[3,7] horizon=[0,0] children=[2]\n";
  CHECK(t.dump() == expect);
  CHECK(SyntaxTree::build(desugar(to_nnf(parse_formula("((G[1,3] h1) U'[2,5] (h2)) & G[3,7] h3")),
                                  three_preds(), small_grid()))
            .dump() == expect);
}

TEST_CASE("tree: hashes separate different formulas") {
  SyntaxTree a = nested_example();
  SyntaxTree b = testutil::compile_formula("G[3,7] h3", three_preds(), small_grid());
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() == nested_example().hash());
}
