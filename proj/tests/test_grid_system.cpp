#include <doctest.h>

#include <random>

#include "testutil.hpp"

using namespace stlmon;

TEST_CASE("grid: cell indexing round-trips through centers") {
  GridSpec grid({GridDim{0.0, 45.0, 90}});
  CHECK(grid.cell_count() == 90);
  CHECK(grid.step(0) == doctest::Approx(0.5));
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto x = grid.center(c);
    CHECK(x[0] > 0.0);
    CHECK(x[0] < 45.0);
    auto back = grid.cell_of(x);
    REQUIRE(back.has_value());
    CHECK(*back == c);
  }
}

TEST_CASE("grid: boundary points snap into the box, outside points do not") {
  GridSpec grid({GridDim{0.0, 12.0, 24}, GridDim{0.0, 12.0, 24}});
  double corner[2] = {12.0, 12.0};
  auto cell = grid.cell_of(corner);
  REQUIRE(cell.has_value());
  CHECK(*cell == grid.cell_count() - 1);
  double outside[2] = {12.1, 5.0};
  CHECK(!grid.cell_of(outside).has_value());
  double below[2] = {-0.01, 5.0};
  CHECK(!grid.cell_of(below).has_value());
}

TEST_CASE("grid: invalid specs are rejected") {
  CHECK_THROWS_AS(GridSpec(std::vector<GridDim>{}), ConfigError);
  CHECK_THROWS_AS(GridSpec({GridDim{5.0, 5.0, 10}}), ConfigError);
  CHECK_THROWS_AS(GridSpec({GridDim{0.0, 1.0, 0}}), ConfigError);
}

TEST_CASE("state set: operations and tail masking") {
  StateSet a(70);
  a.set(0);
  a.set(69);
  CHECK(a.count() == 2);
  StateSet b = a.complement();
  CHECK(b.count() == 68);
  CHECK(!b.test(0));
  CHECK(b.test(1));
  CHECK((a | b).all());
  CHECK((a & b).none());
  StateSet c = a;
  c.and_not(a);
  CHECK(c.none());
}

TEST_CASE("state set: hex encoding round-trips on random sets") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng() % 300);
    StateSet s(n);
    for (int i = 0; i < n; ++i)
      if (rng() & 1) s.set(i);
    StateSet back = StateSet::from_hex(n, s.to_hex());
    CHECK(back == s);
  }
  CHECK_THROWS_AS(StateSet::from_hex(16, "zz"), ConfigError);
  CHECK_THROWS_AS(StateSet::from_hex(16, "abc"), ConfigError);
}

TEST_CASE("thermal dynamics match hand evaluation") {
  SystemModel m = testutil::thermal_case_model();
  double x20[1] = {20.0}, u1[1] = {1.0}, u0[1] = {0.0}, x0[1] = {0.0};
  CHECK(m.apply(x20, u1)[0] == doctest::Approx(21.6));
  CHECK(m.apply(x0, u0)[0] == doctest::Approx(0.0));
  // fixed point of the unheated ambient stays in its cell
  auto cell0 = m.grid().cell_of(x0);
  REQUIRE(cell0.has_value());
  CHECK(m.next(*cell0, 0) == *cell0);
}

TEST_CASE("robot dynamics are the integrator") {
  SystemModel m = testutil::robot_case_model();
  double x[2] = {5.0, 5.0}, u[2] = {1.0, 1.0};
  auto y = m.apply(x, u);
  CHECK(y[0] == doctest::Approx(6.0));
  CHECK(y[1] == doctest::Approx(6.0));
}

TEST_CASE("affine model validates its shapes") {
  GridSpec grid({GridDim{-1.0, 1.0, 4}});
  CHECK_THROWS_AS(make_affine(grid, {{0.0}}, {1.0, 0.0}, {1.0}), ConfigError);
  CHECK_THROWS_AS(make_affine(grid, {}, {1.0}, {1.0}), ConfigError);
  SystemModel m = make_affine(grid, {{0.0}, {1.0}}, {0.5}, {0.25}, 2.0);
  double x[1] = {0.5}, u[1] = {1.0};
  CHECK(m.apply(x, u)[0] == doctest::Approx(0.75));
}

TEST_CASE("one-step feasible set: trivial targets") {
  SystemModel m = testutil::thermal_case_model();
  StateSet empty(m.grid().cell_count());
  CHECK(one_step_feasible(m, empty).none());
  // every temperature has an in-domain successor (heater off cools inward)
  CHECK(!m.has_dead_cells());
  CHECK(one_step_feasible(m, StateSet::full(m.grid().cell_count())).all());
}

TEST_CASE("one-step feasible set of the comfort band matches the analytic preimage") {
  SystemModel m = testutil::thermal_case_model();
  Predicate comfort = Predicate::make_box({std::array<double, 2>{20.0, 25.0}});
  StateSet target = predicate_region(comfort, m.grid());
  StateSet pre = one_step_feasible(m, target);
  // continuous preimage of [20,25] is [15.6/0.86, 25/0.94] ~ [18.14, 26.60]
  double lo = m.grid().center(pre.min_cell())[0];
  double hi = m.grid().center(pre.max_cell())[0];
  CHECK(lo == doctest::Approx(18.1395).epsilon(0.5 / 18.0));
  CHECK(hi == doctest::Approx(26.5957).epsilon(0.5 / 26.0));
  CHECK(std::abs(lo - 18.1395) <= 0.5);
  CHECK(std::abs(hi - 26.5957) <= 0.5);
}

TEST_CASE("one-step feasible set of a robot box is the inflated box") {
  SystemModel m = testutil::robot_case_model();
  Predicate a2 = Predicate::make_box(
      {std::array<double, 2>{6.0, 8.0}, std::array<double, 2>{6.0, 8.0}});
  StateSet box = predicate_region(a2, m.grid());
  Predicate inflated = Predicate::make_box(
      {std::array<double, 2>{5.0, 9.0}, std::array<double, 2>{5.0, 9.0}});
  StateSet expect = predicate_region(inflated, m.grid());
  CHECK(one_step_feasible(m, box) == expect);
}

TEST_CASE("one-step feasible set is monotone and distributes over union") {
  SystemModel m = testutil::robot_case_model();
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    StateSet s1(m.grid().cell_count()), s2(m.grid().cell_count());
    for (int i = 0; i < m.grid().cell_count(); ++i) {
      if (rng() % 8 == 0) s1.set(i);
      if (rng() % 8 == 0) s2.set(i);
    }
    StateSet u1 = one_step_feasible(m, s1);
    StateSet u12 = one_step_feasible(m, s1 | s2);
    // monotone: s1 <= s1|s2 pointwise
    CHECK((u1 & u12) == u1);
    // distributes over union
    CHECK(u12 == (u1 | one_step_feasible(m, s2)));
  }
}

TEST_CASE("transition table rebuilds are identical") {
  SystemModel a = testutil::robot_case_model();
  SystemModel b = testutil::robot_case_model();
  for (int c = 0; c < a.grid().cell_count(); ++c)
    for (int u = 0; u < a.input_count(); ++u) REQUIRE(a.next(c, u) == b.next(c, u));
}
