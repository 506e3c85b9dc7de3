#ifndef CTRLPLACE_SOLVERS_HPP
#define CTRLPLACE_SOLVERS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ctrlplace/objective.hpp"

namespace ctrlplace {

struct SolveResult {
  Placement placement;
  double w = 0.0;
  double wc = 0.0;
  double wr = 0.0;
  double w_tilde = 0.0;
  double elapsed_s = 0.0;
  std::int64_t evaluations = 0;  // objective evaluations performed
  std::string solver;            // "exact" | "greedy"
  std::uint64_t seed = 0;        // greedy only
};

struct ExactOptions {
  bool prune = true;      // branch-and-bound pruning; never changes the optimum
  int max_candidates = 24;  // refuse larger ground sets
};

/// Minimizes W over all nonempty candidate subsets with the optimal
/// assignment. Ties broken by smaller cardinality, then lexicographically
/// smallest candidate set. Throws std::invalid_argument when the candidate
/// count exceeds opts.max_candidates (use the greedy solver instead).
SolveResult solve_exact(const Instance& inst, const ExactOptions& opts = {});

struct GreedyOptions {
  /// Standard gains-based randomized double greedy: candidate i joins with
  /// probability a/(a+b), a = gain of adding to the lower set, b = gain of
  /// removing from the upper set, a/(a+b) taken as 1 when a + b == 0.
  /// When true, uses the inverted losses-based rule instead (kept for
  /// comparison; no approximation guarantee).
  bool losses_rule = false;
  /// Optional trace of (lower, upper) masks after each candidate decision.
  std::vector<std::pair<uint64_t, uint64_t>>* trace = nullptr;
};

/// Randomized linear-time double greedy on w_tilde over the candidate set,
/// visiting candidates in ascending position order. A final empty set is
/// repaired to the best single candidate. Deterministic given seed.
SolveResult solve_double_greedy(const Instance& inst, std::uint64_t seed,
                                const GreedyOptions& opts = {});

struct SupermodularityReport {
  std::int64_t triples_checked = 0;
  double worst_violation = 0.0;  // max over triples, 0 when none positive
  bool exhaustive = false;
  // Worst triple for diagnostics (masks over candidate positions).
  uint64_t worst_a = 0, worst_b = 0;
  int worst_k = -1;
};

/// Verifies the diminishing-marginal-cost inequality
///   f(B + k) - f(B) >= f(A + k) - f(A)   for A subset of B, k outside B
/// on the instance objective W. Exhausts all triples when the candidate
/// count is at most 8, otherwise samples `trials` random triples.
SupermodularityReport check_supermodularity(const Instance& inst,
                                            std::int64_t trials,
                                            std::uint64_t seed);

/// Same check for an arbitrary set function over ground set {0..n-1};
/// used both by the instance wrapper and by negative-control tests.
SupermodularityReport check_supermodularity_fn(
    const std::function<double(uint64_t)>& f, int n, std::int64_t trials,
    std::uint64_t seed);

/// One CSV row per run: solver, seed, n_placed, placed (semicolon-joined
/// candidate ids), w, wc, wr, w_tilde, elapsed, evaluations.
std::string solve_result_csv_header();
std::string solve_result_csv_row(const Instance& inst, const SolveResult& r,
                                 bool with_timing = false);

}  // namespace ctrlplace

#endif  // CTRLPLACE_SOLVERS_HPP
