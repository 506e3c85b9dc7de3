#include <doctest.h>

#include <cmath>

#include "ctrlplace/montecarlo.hpp"
#include "ctrlplace/solvers.hpp"
#include "oracles.hpp"

using namespace ctrlplace;

namespace {

Node make_node(const std::string& id) {
  Node n;
  n.id = id;
  return n;
}

Topology make_graph(int n, std::vector<Edge> edges) {
  std::vector<Node> nodes;
  for (int i = 0; i < n; ++i) nodes.push_back(make_node(std::to_string(i)));
  return Topology(std::move(nodes), std::move(edges));
}

FailureAssignment zero_failures(const Topology& t) {
  FailureAssignment fa;
  fa.node_fail.assign(t.node_count(), 0.0);
  fa.edge_fail.assign(t.edge_count(), 0.0);
  fa.sat_fail.assign(t.gateways().size(), 0.0);
  return fa;
}

}  // namespace

TEST_CASE("degenerate probabilities give exact estimates") {
  Topology t = make_graph(2, {{0, 1, 1.0}});
  FailureAssignment fa = zero_failures(t);
  SimReport clean = simulate_path(t, {0, 1}, fa, 5000, 1);
  CHECK(clean.estimated_error == 0.0);
  CHECK(clean.analytic_error == 0.0);
  CHECK(clean.std_error == 0.0);

  fa.edge_fail = {1.0};
  SimReport doomed = simulate_path(t, {0, 1}, fa, 5000, 1);
  CHECK(doomed.estimated_error == 1.0);
  CHECK(doomed.analytic_error == 1.0);

  CHECK_THROWS_AS(simulate_path(t, {0, 1}, fa, 0, 1), std::invalid_argument);
}

TEST_CASE("estimate agrees with the frozen three-component value") {
  Topology t = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  FailureAssignment fa = zero_failures(t);
  fa.edge_fail = {0.02, 0.02};
  fa.node_fail = {0.0, 0.05, 0.0};

  SimReport rep = simulate_path(t, {0, 1, 2}, fa, 1000000, 13);
  CHECK(rep.analytic_error == doctest::Approx(0.08762).epsilon(1e-12));
  CHECK(std::abs(rep.estimated_error - rep.analytic_error) <=
        3 * rep.std_error);
  CHECK(rep.std_error == doctest::Approx(std::sqrt(rep.estimated_error *
                                                   (1 - rep.estimated_error) /
                                                   1000000))
                             .epsilon(1e-12));
}

TEST_CASE("same seed reproduces the report bit for bit") {
  Rng rng(14);
  Topology t = oracles::random_topology(rng, 6, 4);
  FailureAssignment fa = zero_failures(t);
  for (auto& p : fa.edge_fail) p = 0.1 * rng.next_double();
  for (auto& p : fa.node_fail) p = 0.1 * rng.next_double();
  auto path = oracles::paths_by_latency(t, 0, 5).front();
  SimReport a = simulate_path(t, path, fa, 20000, 99);
  SimReport b = simulate_path(t, path, fa, 20000, 99);
  CHECK(a.estimated_error == b.estimated_error);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("per-sample seeding makes prefixes consistent") {
  // The first n/2 samples of a run are exactly the samples of a half-size
  // run, so failure counts nest; any batch split merges to the same total.
  Topology t = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  FailureAssignment fa = zero_failures(t);
  fa.edge_fail = {0.3, 0.2};
  fa.node_fail = {0.0, 0.1, 0.0};
  const std::int64_t n = 40000;
  SimReport full = simulate_path(t, {0, 1, 2}, fa, n, 7);
  SimReport half = simulate_path(t, {0, 1, 2}, fa, n / 2, 7);
  auto fails = [](const SimReport& r) {
    return std::llround(r.estimated_error * r.samples);
  };
  CHECK(fails(full) >= fails(half));
  CHECK(fails(full) - fails(half) <= n / 2);
}

TEST_CASE("doubling samples tightens the estimate in distribution") {
  Topology t = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
  FailureAssignment fa = zero_failures(t);
  fa.edge_fail = {0.05, 0.05};
  fa.node_fail = {0.0, 0.02, 0.0};
  // 3-sigma acceptance across 100 seeded trials, small and large.
  int ok_small = 0, ok_large = 0;
  double err_small = 0.0, err_large = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    SimReport s = simulate_path(t, {0, 1, 2}, fa, 4000, 1000 + seed);
    SimReport l = simulate_path(t, {0, 1, 2}, fa, 8000, 2000 + seed);
    if (std::abs(s.estimated_error - s.analytic_error) <= 3 * s.std_error)
      ++ok_small;
    if (std::abs(l.estimated_error - l.analytic_error) <= 3 * l.std_error)
      ++ok_large;
    err_small += std::abs(s.estimated_error - s.analytic_error);
    err_large += std::abs(l.estimated_error - l.analytic_error);
  }
  CHECK(ok_small >= 99);
  CHECK(ok_large >= 99);
  CHECK(err_large < err_small);  // mean absolute deviation shrinks
}

TEST_CASE("placement simulation aggregates against wr") {
  Rng rng(15);
  SUBCASE("failure-free network simulates to zero") {
    Topology t = oracles::random_topology(rng, 6, 4);
    t.set_gateways({t.id(0)});
    FailureAssignment fa = zero_failures(t);
    ErrorMatrix em = reliability_matrix(t, fa);
    Instance inst = build_instance(t, em, 1.0);
    Placement p = make_placement(inst, 1);
    PlacementSimReport rep = simulate_placement(t, em, inst, p, fa, 2000, 3);
    CHECK(rep.aggregate_estimate == 0.0);
    CHECK(rep.aggregate_analytic == 0.0);
  }
  SUBCASE("singleton placement on a path graph") {
    Topology t = make_graph(3, {{0, 1, 1.0}, {1, 2, 1.0}});
    t.set_gateways({"0"});
    FailureAssignment fa = zero_failures(t);
    fa.edge_fail = {0.04, 0.03};
    fa.node_fail = {0.0, 0.02, 0.0};
    ErrorMatrix em = reliability_matrix(t, fa);
    Instance inst = build_instance(t, em, 1.0);
    Placement p = make_placement(inst, 1ULL << 1);  // controller at node 1
    PlacementSimReport rep =
        simulate_placement(t, em, inst, p, fa, 100000, 4);
    REQUIRE(rep.per_node.size() == 3);
    for (const SimReport& r : rep.per_node)
      CHECK(std::abs(r.estimated_error - r.analytic_error) <=
            3 * std::max(r.std_error, 1e-9));
    // Node 1 serves itself over the empty path.
    CHECK(rep.per_node[1].analytic_error == 0.0);
    CHECK(rep.per_node[1].estimated_error == 0.0);
  }
  SUBCASE("aggregate matches wr divided by node count") {
    Topology t = oracles::random_topology(rng, 7, 5);
    t.set_gateways({t.id(2)});
    FailureAssignment fa = zero_failures(t);
    for (auto& p : fa.edge_fail) p = 0.05 * rng.next_double();
    for (auto& p : fa.node_fail) p = 0.05 * rng.next_double();
    ErrorMatrix em = reliability_matrix(t, fa);
    Instance inst = build_instance(t, em, 1.0);
    SolveResult sol = solve_exact(inst);
    PlacementSimReport rep = simulate_placement(t, em, inst, sol.placement,
                                                fa, 100000, 5);
    CHECK(rep.aggregate_analytic ==
          doctest::Approx(sol.wr / inst.node_count()).epsilon(1e-12));
    CHECK(std::abs(rep.aggregate_estimate - rep.aggregate_analytic) <=
          3 * std::max(rep.aggregate_std_error, 1e-9));
  }
}

TEST_CASE("simulation report export") {
  SimReport r;
  r.samples = 10;
  r.estimated_error = 0.25;
  r.analytic_error = 0.2;
  r.std_error = 0.1;
  std::string csv = sim_reports_csv({{"a->b", r}});
  CHECK(csv == "path,samples,analytic,estimate,std_error\n"
               "a->b,10,0.2,0.25,0.1\n");
}
