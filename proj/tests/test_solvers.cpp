#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ctrlplace/solvers.hpp"
#include "oracles.hpp"

using namespace ctrlplace;

namespace {

Instance make_instance(int n_cand, int n_nodes, std::vector<double> e,
                       std::vector<double> d, double alpha) {
  Instance inst;
  for (int v = 0; v < n_nodes; ++v) inst.node_ids.push_back(std::to_string(v));
  for (int c = 0; c < n_cand; ++c) inst.cand_ids.push_back(std::to_string(c));
  inst.e = std::move(e);
  inst.d = std::move(d);
  inst.alpha = alpha;
  inst.w_bar = upper_bound(alpha, inst.d, n_nodes);
  inst.validate();
  return inst;
}

// Candidate 0 is free and perfect; the others are expensive and useless.
Instance dominant_candidate_instance() {
  std::vector<double> e(3 * 4, 1.0);
  for (int v = 0; v < 4; ++v) e[v] = 0.0;  // candidate 0 row
  return make_instance(3, 4, std::move(e), {0.0, 10.0, 10.0}, 1.0);
}

}  // namespace

TEST_CASE("exact solver on a single candidate") {
  Instance inst = make_instance(1, 3, {0.1, 0.2, 0.3}, {5.0}, 1.0);
  SolveResult r = solve_exact(inst);
  CHECK(r.placement.placed == std::vector<int>{0});
  CHECK(r.placement.assignment == std::vector<int>{0, 0, 0});
  CHECK(r.w == doctest::Approx(5.0 + 0.6).epsilon(1e-15));
  CHECK(r.solver == "exact");
  CHECK(r.w + r.w_tilde == doctest::Approx(inst.w_bar).epsilon(1e-12));
  CHECK(r.w == doctest::Approx(inst.alpha * r.wc + r.wr).epsilon(1e-12));
}

TEST_CASE("exact solver refuses oversized ground sets") {
  Rng rng(1);
  Instance inst = oracles::random_instance(rng, 6, 4, 1.0);
  ExactOptions opts;
  opts.max_candidates = 5;
  CHECK_THROWS_WITH_AS(solve_exact(inst, opts),
                       doctest::Contains("solve_double_greedy"),
                       std::invalid_argument);
}

TEST_CASE("dominating alpha forces the best singleton") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    Instance inst = oracles::random_instance(rng, 6, 6, 1e9);
    SolveResult r = solve_exact(inst);
    CHECK(r.placement.placed.size() == 1);
    // Verified against full enumeration.
    auto best = oracles::exhaustive_best_subset(inst);
    CHECK(placed_mask(r.placement) == best.mask);
    CHECK(r.w == best.w);
  }
}

TEST_CASE("exact solver equals plain enumeration on random instances") {
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    Instance inst = oracles::random_instance(rng, 10, 8, 1.0,
                                             0.5 + rng.next_double());
    SolveResult r = solve_exact(inst);
    auto best = oracles::exhaustive_best_subset(inst);
    CHECK(placed_mask(r.placement) == best.mask);
    CHECK(r.w == best.w);
  }
}

TEST_CASE("pruning never changes the optimum or the tie-break") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    int k = 2 + static_cast<int>(rng.next_below(11));  // up to 12
    Instance inst = oracles::random_instance(rng, k, 6, 1.0,
                                             rng.next_double() * 2.0);
    ExactOptions pruned;
    ExactOptions plain;
    plain.prune = false;
    SolveResult a = solve_exact(inst, pruned);
    SolveResult b = solve_exact(inst, plain);
    CHECK(a.w == b.w);
    CHECK(placed_mask(a.placement) == placed_mask(b.placement));
    CHECK(a.placement.assignment == b.placement.assignment);
    CHECK(a.evaluations <= b.evaluations);
    // Plain enumeration evaluates every nonempty subset.
    CHECK(b.evaluations == (1LL << k) - 1);
  }
}

TEST_CASE("fully tied instance resolves to the smallest singleton") {
  // Zero distances and zero errors: every nonempty subset scores 0.
  Instance inst = make_instance(3, 4, std::vector<double>(12, 0.0),
                                {0.0, 0.0, 0.0}, 1.0);
  SolveResult r = solve_exact(inst);
  CHECK(r.placement.placed == std::vector<int>{0});
  ExactOptions plain;
  plain.prune = false;
  SolveResult u = solve_exact(inst, plain);
  CHECK(u.placement.placed == std::vector<int>{0});
}

TEST_CASE("double greedy takes a dominant candidate with probability one") {
  Instance inst = dominant_candidate_instance();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    SolveResult r = solve_double_greedy(inst, seed);
    CHECK(r.placement.placed == std::vector<int>{0});
    CHECK(r.solver == "greedy");
    CHECK(r.seed == seed);
  }
}

TEST_CASE("double greedy keeps everything when the surrogate is flat") {
  // Failure-free, zero-distance: w_tilde is |V| on every nonempty set, so
  // after the first inclusion every a+b == 0 tie includes by convention.
  Instance inst = make_instance(4, 5, std::vector<double>(20, 0.0),
                                {0.0, 0.0, 0.0, 0.0}, 1.0);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SolveResult r = solve_double_greedy(inst, seed);
    CHECK(r.placement.placed == std::vector<int>{0, 1, 2, 3});
  }
}

TEST_CASE("double greedy is deterministic per seed and counts evaluations") {
  Rng rng(5);
  Instance inst = oracles::random_instance(rng, 7, 6, 1.0);
  SolveResult a = solve_double_greedy(inst, 42);
  SolveResult b = solve_double_greedy(inst, 42);
  CHECK(placed_mask(a.placement) == placed_mask(b.placement));
  CHECK(a.w == b.w);
  if (!a.placement.placed.empty())  // no repair pass happened
    CHECK(a.evaluations == 4 * inst.candidate_count());
}

TEST_CASE("double greedy trace keeps the nested-set invariant") {
  Rng rng(6);
  Instance inst = oracles::random_instance(rng, 8, 6, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<std::pair<uint64_t, uint64_t>> trace;
    GreedyOptions opts;
    opts.trace = &trace;
    SolveResult r = solve_double_greedy(inst, seed, opts);
    REQUIRE(trace.size() == 8);
    uint64_t prev_lower = 0, prev_upper = inst.full_mask();
    for (int i = 0; i < 8; ++i) {
      auto [lower, upper] = trace[i];
      // Lower stays inside upper, and both agree on candidates 0..i.
      CHECK((lower & ~upper) == 0);
      uint64_t decided = (i == 63) ? ~0ULL : ((1ULL << (i + 1)) - 1);
      CHECK((lower & decided) == (upper & decided));
      // Each iteration changes exactly one of the two sets.
      CHECK(((lower ^ prev_lower) | (upper ^ prev_upper)) == (1ULL << i));
      prev_lower = lower;
      prev_upper = upper;
    }
    CHECK(trace.back().first == trace.back().second);
    CHECK(placed_mask(r.placement) == trace.back().first);
  }
}

TEST_CASE("exact is never worse than the greedy") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Instance inst = oracles::random_instance(rng, 8, 7, 1.0,
                                             rng.next_double());
    SolveResult ex = solve_exact(inst);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      SolveResult gr = solve_double_greedy(inst, seed);
      CHECK(ex.w <= gr.w);
    }
  }
}

TEST_CASE("greedy mean stays above half of the best surrogate") {
  Rng rng(8);
  for (int trial = 0; trial < 4; ++trial) {
    Instance inst = oracles::random_instance(rng, 6, 8, 1.0);
    auto best = oracles::exhaustive_best_subset(inst);
    double opt_wt = std::max(w_tilde(inst, best.mask), w_tilde(inst, 0));
    const int n = 2000;
    double sum = 0.0, sum_sq = 0.0;
    for (int seed = 0; seed < n; ++seed) {
      double wt = solve_double_greedy(inst, seed).w_tilde;
      sum += wt;
      sum_sq += wt * wt;
    }
    double mean = sum / n;
    double var = (sum_sq - n * mean * mean) / (n - 1);
    double se = std::sqrt(std::max(var, 0.0) / n);
    CHECK(mean >= 0.5 * opt_wt - 3 * se);
  }
}

TEST_CASE("the literal losses-based rule inverts the decisions") {
  Instance inst = dominant_candidate_instance();
  GreedyOptions literal;
  literal.losses_rule = true;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SolveResult r = solve_double_greedy(inst, seed, literal);
    // The inverted probabilities reject the dominant candidate and keep
    // the harmful ones, deterministically.
    CHECK(r.placement.placed == std::vector<int>{1, 2});
  }
}

TEST_CASE("empty greedy outcome is repaired to the best singleton") {
  // One node, one candidate with a large distance: dropping it is always
  // the gain move, so the raw greedy ends empty and repair must kick in.
  Instance inst = make_instance(1, 1, {0.9}, {100.0}, 1.0);
  SolveResult r = solve_double_greedy(inst, 0);
  CHECK(r.placement.placed == std::vector<int>{0});
  CHECK(r.w == doctest::Approx(100.9).epsilon(1e-12));
}

TEST_CASE("supermodularity check: clean, modular, and broken functions") {
  Rng rng(9);
  SUBCASE("random instances pass exhaustively") {
    for (int trial = 0; trial < 5; ++trial) {
      Instance inst = oracles::random_instance(rng, 6, 6, 1.0);
      SupermodularityReport rep = check_supermodularity(inst, 0, 0);
      CHECK(rep.exhaustive);
      CHECK(rep.triples_checked > 0);
      CHECK(rep.worst_violation <= 1e-9);
    }
  }
  SUBCASE("equal error columns make the marginals exactly modular") {
    // Every candidate offers the same error to each node, so adding k
    // changes wr identically regardless of context.
    std::vector<double> e;
    for (int c = 0; c < 4; ++c)
      for (int v = 0; v < 5; ++v) e.push_back(0.1 * (v + 1));
    Instance inst = make_instance(4, 5, std::move(e), {1, 2, 3, 4}, 1.0);
    SupermodularityReport rep = check_supermodularity(inst, 0, 0);
    CHECK(rep.worst_violation == 0.0);
  }
  SUBCASE("a coverage-style function is flagged") {
    auto broken = [](uint64_t mask) {
      return mask ? 1.0 : 0.0;  // min(|S|, 1): submodular, not supermodular
    };
    SupermodularityReport rep = check_supermodularity_fn(broken, 4, 0, 0);
    CHECK(rep.worst_violation == doctest::Approx(1.0));
    CHECK(rep.worst_k >= 0);
  }
  SUBCASE("sampled mode checks the requested number of triples") {
    Instance inst = oracles::random_instance(rng, 10, 6, 1.0);
    SupermodularityReport rep = check_supermodularity(inst, 500, 77);
    CHECK_FALSE(rep.exhaustive);
    CHECK(rep.triples_checked == 500);
    CHECK(rep.worst_violation <= 1e-9);
  }
}

TEST_CASE("solve result export row") {
  Instance inst = make_instance(2, 2, {0.0, 0.1, 0.2, 0.0}, {1.5, 2.5}, 2.0);
  SolveResult r = solve_exact(inst);
  std::string header = solve_result_csv_header();
  CHECK(header ==
        "solver,seed,n_placed,placed,w,wc,wr,w_tilde,elapsed,evaluations");
  std::string row = solve_result_csv_row(inst, r);
  CHECK(row.rfind("exact,0,", 0) == 0);
  // Timing is zeroed unless explicitly requested.
  CHECK(row.find(",0,") != std::string::npos);
}
