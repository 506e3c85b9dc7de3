#include "ctrlplace/solvers.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>

#include "ctrlplace/csv.hpp"
#include "ctrlplace/rng.hpp"

namespace ctrlplace {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Exhaustive minimization of W over nonempty candidate subsets, depth-first
// over candidate positions with an optional admissible lower bound. The
// leaf objective is always recomputed in a fixed order (candidates
// ascending, nodes ascending), so pruning cannot change the reported
// optimum or the tie-breaking.
struct ExactSearch {
  const Instance& inst;
  bool prune;
  int n_cand;
  int n_nodes;

  // suffix_min[i][v] = min error for node v over candidates i..K-1.
  std::vector<double> suffix_min;

  uint64_t best_mask = 0;
  double best_w = std::numeric_limits<double>::infinity();
  int best_count = 0;
  std::int64_t evaluations = 0;

  std::vector<double> cur_min;  // per-node min error over included so far
  std::vector<double> d_prefix;  // d sum over included so far, exact order
  std::vector<double> saved_stack;  // per-depth cur_min snapshots

  explicit ExactSearch(const Instance& i, bool do_prune)
      : inst(i), prune(do_prune), n_cand(i.candidate_count()),
        n_nodes(i.node_count()) {
    suffix_min.assign(static_cast<std::size_t>(n_cand + 1) * n_nodes,
                      std::numeric_limits<double>::infinity());
    for (int c = n_cand - 1; c >= 0; --c)
      for (int v = 0; v < n_nodes; ++v)
        suffix_min[static_cast<std::size_t>(c) * n_nodes + v] =
            std::min(inst.error(c, v),
                     suffix_min[static_cast<std::size_t>(c + 1) * n_nodes + v]);
    cur_min.assign(n_nodes, 1.0);  // empty-set convention: error 1 per node
    d_prefix = {0.0};
    saved_stack.assign(static_cast<std::size_t>(n_cand) * n_nodes, 0.0);
  }

  // Candidate-set comparison for exact ties: fewer controllers first, then
  // the lexicographically smaller sorted id set. Over masks of ascending
  // positions the numeric mask order matches lexicographic set order.
  bool better(double w, uint64_t mask, int count) const {
    if (w != best_w) return w < best_w;
    if (count != best_count) return count < best_count;
    return lex_less(mask, best_mask);
  }

  static bool lex_less(uint64_t a, uint64_t b) {
    while (a && b) {
      int pa = std::countr_zero(a), pb = std::countr_zero(b);
      if (pa != pb) return pa < pb;
      a &= a - 1;
      b &= b - 1;
    }
    return a == 0 && b != 0;  // a exhausted first: a is a proper prefix of b
  }

  void leaf(uint64_t mask, int count) {
    if (mask == 0) return;  // constraint: at least one controller
    ++evaluations;
    double wr = 0.0;
    for (int v = 0; v < n_nodes; ++v) wr += cur_min[v];
    double w = inst.alpha * d_prefix.back() + wr;
    if (better(w, mask, count)) {
      best_w = w;
      best_mask = mask;
      best_count = count;
    }
  }

  double lower_bound(int depth) const {
    double wr = 0.0;
    const double* suf = &suffix_min[static_cast<std::size_t>(depth) * n_nodes];
    for (int v = 0; v < n_nodes; ++v) wr += std::min(cur_min[v], suf[v]);
    return inst.alpha * d_prefix.back() + wr;
  }

  void dfs(int depth, uint64_t mask, int count) {
    if (depth == n_cand) {
      leaf(mask, count);
      return;
    }
    if (prune && best_count > 0) {
      // Strict margin so exact ties always reach leaf evaluation.
      double margin = 1e-12 * (1.0 + std::abs(best_w));
      if (lower_bound(depth) > best_w + margin) return;
    }

    // Include candidate `depth`.
    double* saved = &saved_stack[static_cast<std::size_t>(depth) * n_nodes];
    const double* row = &inst.e[static_cast<std::size_t>(depth) * n_nodes];
    for (int v = 0; v < n_nodes; ++v) {
      saved[v] = cur_min[v];
      cur_min[v] = std::min(cur_min[v], row[v]);
    }
    d_prefix.push_back(d_prefix.back() + inst.d[depth]);
    dfs(depth + 1, mask | (1ULL << depth), count + 1);
    d_prefix.pop_back();
    for (int v = 0; v < n_nodes; ++v) cur_min[v] = saved[v];

    // Exclude it.
    dfs(depth + 1, mask, count);
  }
};

}  // namespace

SolveResult solve_exact(const Instance& inst, const ExactOptions& opts) {
  inst.validate();
  if (inst.candidate_count() > opts.max_candidates)
    throw std::invalid_argument(
        "solve_exact: " + std::to_string(inst.candidate_count()) +
        " candidates exceeds the enumeration limit of " +
        std::to_string(opts.max_candidates) +
        "; use solve_double_greedy for large candidate sets");
  auto t0 = Clock::now();
  ExactSearch search(inst, opts.prune);
  search.dfs(0, 0, 0);

  SolveResult res;
  res.solver = "exact";
  res.placement = make_placement(inst, search.best_mask);
  res.wc = eval_wc(inst, search.best_mask);
  res.wr = eval_wr(inst, search.best_mask);
  res.w = eval_w(inst, search.best_mask);
  res.w_tilde = w_tilde(inst, search.best_mask);
  res.evaluations = search.evaluations;
  res.elapsed_s = seconds_since(t0);
  return res;
}

SolveResult solve_double_greedy(const Instance& inst, std::uint64_t seed,
                                const GreedyOptions& opts) {
  inst.validate();
  auto t0 = Clock::now();
  Rng rng(seed);
  std::int64_t evals = 0;
  auto wt = [&](uint64_t mask) {
    ++evals;
    return w_tilde(inst, mask);
  };

  uint64_t lower = 0;
  uint64_t upper = inst.full_mask();
  for (int c = 0; c < inst.candidate_count(); ++c) {
    uint64_t bit = 1ULL << c;
    double p_add;
    if (!opts.losses_rule) {
      double gain_add = std::max(wt(lower | bit) - wt(lower), 0.0);
      double gain_drop = std::max(wt(upper & ~bit) - wt(upper), 0.0);
      double denom = gain_add + gain_drop;
      p_add = denom == 0.0 ? 1.0 : gain_add / denom;
    } else {
      // Inverted rule that adds proportionally to the loss of adding;
      // kept only for comparison runs.
      double loss_add = std::max(wt(lower) - wt(lower | bit), 0.0);
      double loss_drop = std::max(wt(upper) - wt(upper & ~bit), 0.0);
      double denom = loss_add + loss_drop;
      p_add = denom == 0.0 ? 1.0 : loss_add / denom;
    }
    if (rng.next_double() < p_add)
      lower |= bit;
    else
      upper &= ~bit;
    if (opts.trace) opts.trace->push_back({lower, upper});
  }
  // The two policies have agreed on every candidate by now.
  uint64_t chosen = lower;

  if (chosen == 0) {
    // Feasibility repair: every node needs a controller; add the best
    // single candidate.
    int best = 0;
    double best_w = std::numeric_limits<double>::infinity();
    for (int c = 0; c < inst.candidate_count(); ++c) {
      ++evals;
      double w = eval_w(inst, 1ULL << c);
      if (w < best_w) {
        best_w = w;
        best = c;
      }
    }
    chosen = 1ULL << best;
  }

  SolveResult res;
  res.solver = "greedy";
  res.seed = seed;
  res.placement = make_placement(inst, chosen);
  res.wc = eval_wc(inst, chosen);
  res.wr = eval_wr(inst, chosen);
  res.w = eval_w(inst, chosen);
  res.w_tilde = w_tilde(inst, chosen);
  res.evaluations = evals;
  res.elapsed_s = seconds_since(t0);
  return res;
}

SupermodularityReport check_supermodularity_fn(
    const std::function<double(uint64_t)>& f, int n, std::int64_t trials,
    std::uint64_t seed) {
  if (n < 1 || n > 63)
    throw std::invalid_argument("supermodularity check: bad ground-set size");
  SupermodularityReport rep;
  auto record = [&](uint64_t a, uint64_t b, int k, double fa_k, double fa,
                    double fb_k, double fb) {
    ++rep.triples_checked;
    double violation = (fa_k - fa) - (fb_k - fb);
    if (violation > rep.worst_violation) {
      rep.worst_violation = violation;
      rep.worst_a = a;
      rep.worst_b = b;
      rep.worst_k = k;
    }
  };

  if (n <= 8) {
    rep.exhaustive = true;
    uint64_t full = (1ULL << n) - 1;
    std::vector<double> table(1ULL << n);
    for (uint64_t m = 0; m <= full; ++m) table[m] = f(m);
    for (uint64_t b = 0; b <= full; ++b) {
      // All submasks of b, including empty and b itself.
      uint64_t a = b;
      while (true) {
        for (int k = 0; k < n; ++k) {
          uint64_t bit = 1ULL << k;
          if (b & bit) continue;
          record(a, b, k, table[a | bit], table[a], table[b | bit], table[b]);
        }
        if (a == 0) break;
        a = (a - 1) & b;
      }
    }
    return rep;
  }

  Rng rng(seed);
  uint64_t full = (n == 64) ? ~0ULL : ((1ULL << n) - 1);
  for (std::int64_t t = 0; t < trials; ++t) {
    uint64_t b = rng.next_u64() & full;
    if (b == full) {
      --t;  // no k outside B; redraw
      continue;
    }
    uint64_t a = b & rng.next_u64();
    // Pick k uniformly among positions outside B.
    int outside = n - std::popcount(b);
    int pick = static_cast<int>(rng.next_below(outside));
    int k = -1;
    for (int c = 0; c < n; ++c) {
      if (b & (1ULL << c)) continue;
      if (pick-- == 0) {
        k = c;
        break;
      }
    }
    uint64_t bit = 1ULL << k;
    record(a, b, k, f(a | bit), f(a), f(b | bit), f(b));
  }
  return rep;
}

SupermodularityReport check_supermodularity(const Instance& inst,
                                            std::int64_t trials,
                                            std::uint64_t seed) {
  return check_supermodularity_fn(
      [&inst](uint64_t mask) { return eval_w(inst, mask); },
      inst.candidate_count(), trials, seed);
}

std::string solve_result_csv_header() {
  return "solver,seed,n_placed,placed,w,wc,wr,w_tilde,elapsed,evaluations";
}

std::string solve_result_csv_row(const Instance& inst, const SolveResult& r,
                                 bool with_timing) {
  std::string placed;
  for (std::size_t i = 0; i < r.placement.placed.size(); ++i) {
    if (i) placed += ';';
    placed += inst.cand_ids[r.placement.placed[i]];
  }
  return csv_join({r.solver, std::to_string(r.seed),
                   std::to_string(r.placement.placed.size()), placed,
                   format_double(r.w), format_double(r.wc), format_double(r.wr),
                   format_double(r.w_tilde),
                   format_double(with_timing ? r.elapsed_s : 0.0),
                   std::to_string(r.evaluations)});
}

}  // namespace ctrlplace
