#ifndef CTRLPLACE_EXPERIMENTS_HPP
#define CTRLPLACE_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctrlplace/solvers.hpp"
#include "ctrlplace/topology.hpp"

namespace ctrlplace {

struct ExperimentConfig {
  std::string topology_path;
  std::string topology_name;  // defaults to the file stem

  // Gateways: explicit ids win; otherwise gateway_count nodes are chosen by
  // the greedy k-median fallback.
  std::vector<std::string> gateway_ids;
  int gateway_count = 5;

  // Candidates: explicit ids, or a cap (first max_candidates nodes in id
  // order), or all nodes when neither is set.
  std::vector<std::string> candidate_ids;
  std::optional<int> max_candidates;

  std::vector<int> cases = {1};      // failure case ids
  std::vector<double> alphas = {1.0};
  ReliabilityOptions reliability;
  bool run_exact = true;
  bool run_greedy = true;
  int repeats = 100;
  std::uint64_t master_seed = 1;
  std::string out_dir;
  int jobs = 1;
  bool with_timing = false;  // real elapsed times in CSV (not reproducible)

  /// Zero all failure probabilities regardless of case (degenerate runs).
  bool failure_free = false;
};

/// key = value text, '#' comments. Unknown keys are an error.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

struct TrialRow {
  std::string topology;
  int case_id = 0;
  double alpha = 0.0;
  std::string solver;
  std::uint64_t seed = 0;  // the trial's failure-draw seed
  int n_controllers = 0;
  double w = 0.0;
  double wc = 0.0;
  double wr = 0.0;
  double avg_reliability = 0.0;  // 1 - wr / |V|
  double d_avg = 0.0;            // wc / n_controllers
  double elapsed_s = 0.0;
  std::int64_t evaluations = 0;
  std::string placed;  // semicolon-joined controller ids
};

struct SummaryRow {
  std::string topology;
  int case_id = 0;
  double alpha = 0.0;
  std::string solver;
  int repeats = 0;
  double mean_n = 0.0;
  double mean_w = 0.0, std_w = 0.0;
  double mean_wc = 0.0, std_wc = 0.0;
  double mean_wr = 0.0, std_wr = 0.0;
  double mean_reliability = 0.0, std_reliability = 0.0;
  double mean_elapsed_s = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRow> trials;
  std::vector<SummaryRow> summary;
};

/// Greedy k-median on shortest-path latencies: repeatedly add the node
/// minimizing total latency from every node to its nearest chosen gateway.
/// Deterministic (ties to the smallest node index).
std::vector<int> place_gateways_fallback(const Topology& topo, int count);

/// Loads the configured topology and applies the gateway and candidate
/// settings (fallback gateway placement included).
Topology prepare_topology(const ExperimentConfig& config);

/// Splittable seed scheme, so any repeat is reproducible in isolation:
/// trial_seed(master, r) = derive_seed(master, r); within a trial, failure
/// case c uses sub-streams 3c (failure draw), 3c+1 (greedy coins) and
/// 3c+2 (Monte Carlo validation).
std::uint64_t trial_seed(std::uint64_t master, int repeat);
std::uint64_t trial_failure_seed(std::uint64_t master, int repeat, int case_id);
std::uint64_t trial_greedy_seed(std::uint64_t master, int repeat, int case_id);
std::uint64_t trial_sim_seed(std::uint64_t master, int repeat, int case_id);

/// Runs repeats x cases x alphas x solvers. Per repeat r the failure draw
/// uses derive_seed(master, r) and the greedy coin flips use
/// derive_seed(trial_seed, 1), so any repeat can be reproduced in
/// isolation. Failure draws are shared across alphas and solvers within a
/// repeat. Repeats may execute in parallel (config.jobs); row order is
/// canonical regardless.
ExperimentResult run_trials(const ExperimentConfig& config);

struct SweepRow {
  double alpha = 0.0;
  double mean_n = 0.0;
  double mean_wc = 0.0;
  double mean_wr = 0.0;
};

/// Exact-solver alpha sweep with the failure draw shared per repeat across
/// alphas; rows sorted by alpha. Requires at least two alphas.
std::vector<SweepRow> alpha_sweep(const ExperimentConfig& config);

struct GapRow {
  int case_id = 0;
  double mean_w_exact = 0.0;
  double mean_w_greedy = 0.0;
  double objective_gap = 0.0;        // (greedy - exact) / exact, on W
  double surrogate_gap = 0.0;        // (exact - greedy) / exact, on w_tilde
  double mean_rel_exact = 0.0;
  double mean_rel_greedy = 0.0;
  double reliability_gap = 0.0;      // exact - greedy, percentage points / 100
  double mean_elapsed_exact_s = 0.0;
  double mean_elapsed_greedy_s = 0.0;
  double mean_evals_exact = 0.0;
  double mean_evals_greedy = 0.0;
};

/// Exact-vs-greedy gap table, one row per configured failure case.
std::vector<GapRow> compare_solvers(const ExperimentConfig& config);

std::string trials_csv(const std::vector<TrialRow>& rows, bool with_timing);
std::string summary_csv(const std::vector<SummaryRow>& rows, bool with_timing);
std::string sweep_csv(const std::vector<SweepRow>& rows);
std::string gaps_csv(const std::vector<GapRow>& rows, bool with_timing);

/// Gnuplot-style .dat mirrors of the summary tables (alpha tradeoff,
/// solver comparison, reliability comparison, per-case reliability).
std::string sweep_dat(const std::vector<SweepRow>& rows);
std::string gaps_dat(const std::vector<GapRow>& rows);

}  // namespace ctrlplace

#endif  // CTRLPLACE_EXPERIMENTS_HPP
