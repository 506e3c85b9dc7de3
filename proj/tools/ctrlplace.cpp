// Command-line front end. Every subcommand is a thin wrapper over the
// library: results go to stdout or files, diagnostics to stderr.
// Exit codes: 0 success, 1 usage error, 2 input/data error.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "ctrlplace/csv.hpp"
#include "ctrlplace/experiments.hpp"
#include "ctrlplace/montecarlo.hpp"
#include "ctrlplace/objective.hpp"
#include "ctrlplace/reliability.hpp"
#include "ctrlplace/rng.hpp"
#include "ctrlplace/solvers.hpp"
#include "ctrlplace/topology.hpp"

namespace fs = std::filesystem;
using namespace ctrlplace;

namespace {

struct SharedFlags {
  std::string topology;
  std::string gateways;    // comma list or @file
  int gateway_count = 5;
  std::string candidates;  // comma list or @file
  int max_candidates = 0;  // 0 = all nodes
  std::vector<int> cases = {1};
  std::vector<double> alphas = {1.0};
  std::string mode = "exact-reliable";
  int yen_k = 5;
  bool include_endpoints = false;
  bool satellite_hop = false;
  std::string solver = "both";
  int repeats = 100;
  std::uint64_t seed = 1;
  std::string out;
  int jobs = 1;
  bool timing = false;
  bool failure_free = false;
  bool pretty = false;
};

void add_shared(CLI::App* cmd, SharedFlags& f, bool with_repeats) {
  cmd->add_option("--topology", f.topology, "GraphML topology file")
      ->required();
  cmd->add_option("--gateways", f.gateways,
                  "gateway node ids, comma separated, or @file");
  cmd->add_option("--gateway-count", f.gateway_count,
                  "fallback gateway count when --gateways is absent");
  cmd->add_option("--candidates", f.candidates,
                  "candidate node ids, comma separated, or @file");
  cmd->add_option("--max-candidates", f.max_candidates,
                  "cap the candidate set to the first N nodes in id order");
  cmd->add_option("--case", f.cases, "failure case ids (1..4)");
  cmd->add_option("--alpha", f.alphas, "latency weight(s)");
  cmd->add_option("--mode", f.mode, "exact-reliable or yen-k")
      ->check(CLI::IsMember({"exact-reliable", "yen-k"}));
  cmd->add_option("--yen-k", f.yen_k, "candidate path count for yen-k mode");
  cmd->add_flag("--include-endpoints", f.include_endpoints,
                "count endpoint node failures in error rates");
  cmd->add_flag("--satellite-hop", f.satellite_hop,
                "append the satellite-link factor at gateway endpoints");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out,
                  "output directory (default: $CTRLPLACE_OUT or stdout only)");
  cmd->add_option("--jobs", f.jobs, "parallel repeats");
  cmd->add_flag("--timing", f.timing,
                "write real wall times into CSV (breaks byte reproducibility)");
  cmd->add_flag("--failure-free", f.failure_free,
                "force all failure probabilities to zero");
  cmd->add_flag("--pretty", f.pretty, "human-readable summary on stdout");
  if (with_repeats)
    cmd->add_option("--repeats", f.repeats, "number of repeated trials");
}

ExperimentConfig to_config(const SharedFlags& f) {
  ExperimentConfig cfg;
  cfg.topology_path = f.topology;
  auto ids = [](const std::string& v) -> std::vector<std::string> {
    if (v.empty()) return {};
    if (v[0] == '@') return read_id_list(v.substr(1));
    std::vector<std::string> out;
    std::string cur;
    for (char c : v) {
      if (c == ',') {
        if (!cur.empty()) out.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
  };
  cfg.gateway_ids = ids(f.gateways);
  cfg.gateway_count = f.gateway_count;
  cfg.candidate_ids = ids(f.candidates);
  if (f.max_candidates > 0) cfg.max_candidates = f.max_candidates;
  cfg.cases = f.cases;
  cfg.alphas = f.alphas;
  cfg.reliability.mode =
      f.mode == "yen-k" ? PathMode::kYenK : PathMode::kExactReliable;
  cfg.reliability.yen_k = f.yen_k;
  cfg.reliability.include_endpoints = f.include_endpoints;
  cfg.reliability.satellite_hop = f.satellite_hop;
  cfg.run_exact = f.solver == "exact" || f.solver == "both";
  cfg.run_greedy = f.solver == "greedy" || f.solver == "both";
  cfg.repeats = f.repeats;
  cfg.master_seed = f.seed;
  cfg.out_dir = f.out;
  if (cfg.out_dir.empty()) {
    const char* env = std::getenv("CTRLPLACE_OUT");
    if (env) cfg.out_dir = env;
  }
  cfg.jobs = f.jobs;
  cfg.with_timing = f.timing;
  cfg.failure_free = f.failure_free;
  cfg.topology_name = fs::path(f.topology).stem().string();
  return cfg;
}

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
  fs::create_directories(dir);
  fs::path p = fs::path(dir) / name;
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
  std::cerr << "wrote " << p.string() << "\n";
}

int cmd_inspect(const SharedFlags& f, bool strict) {
  GraphmlOptions gopts;
  std::vector<std::string> warnings;
  gopts.strict_coordinates = strict;
  gopts.warnings = &warnings;
  Topology topo = load_graphml_file(f.topology, gopts);
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  std::cout << topo.node_count() << " nodes, " << topo.edge_count()
            << " links\n";
  if (f.pretty) {
    double total = 0.0, shortest = 1e300, longest = 0.0;
    for (const Edge& e : topo.edges()) {
      total += e.length_km;
      shortest = std::min(shortest, e.length_km);
      longest = std::max(longest, e.length_km);
    }
    std::cout << "total link length " << format_double(total, 6)
              << " km, shortest " << format_double(shortest, 6)
              << " km, longest " << format_double(longest, 6) << " km\n";
    for (const Node& n : topo.nodes())
      std::cout << "  " << n.id << (n.label.empty() ? "" : " (" + n.label + ")")
                << " " << format_double(n.lat, 8) << ","
                << format_double(n.lon, 8) << "\n";
  }
  return 0;
}

int cmd_solve(const SharedFlags& f, const std::string& instance_path,
              bool export_instance, bool export_matrix, bool export_failures) {
  ExperimentConfig cfg = to_config(f);
  int case_id = cfg.cases.front();

  std::optional<Topology> topo;
  std::optional<ErrorMatrix> em;
  std::optional<FailureAssignment> fa;
  Instance inst;
  if (!instance_path.empty()) {
    // Bit-exact replay of a previously exported instance bundle.
    std::ifstream in(instance_path, std::ios::binary);
    if (!in)
      throw std::runtime_error("cannot open instance bundle '" +
                               instance_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    inst = instance_from_csv(buf.str());
  } else {
    topo = prepare_topology(cfg);
    FailureCase fc = cfg.failure_free ? FailureCase{case_id, 0, 0, 0}
                                      : builtin_failure_case(case_id);
    std::uint64_t fseed = trial_failure_seed(cfg.master_seed, 0, case_id);
    fa = sample_failures(*topo, fc, fseed);
    em = reliability_matrix(*topo, *fa, cfg.reliability);
    inst = build_instance(*topo, *em, cfg.alphas.front());
  }

  std::string csv = solve_result_csv_header() + "\n";
  std::vector<SolveResult> results;
  if (cfg.run_exact) results.push_back(solve_exact(inst));
  if (cfg.run_greedy)
    results.push_back(solve_double_greedy(
        inst, trial_greedy_seed(cfg.master_seed, 0, case_id)));
  for (const SolveResult& r : results)
    csv += solve_result_csv_row(inst, r, cfg.with_timing) + "\n";
  std::cout << csv;
  if (f.pretty) {
    for (const SolveResult& r : results) {
      std::cerr << r.solver << ": W=" << format_double(r.w, 6)
                << " (latency term " << format_double(r.wc, 6)
                << " km, reliability term " << format_double(r.wr, 6)
                << "), " << r.placement.placed.size() << " controllers\n";
    }
  }
  if (!cfg.out_dir.empty()) {
    write_file(cfg.out_dir, "solve.csv", csv);
    if (export_instance)
      write_file(cfg.out_dir, "instance.csv", instance_to_csv(inst));
    if (export_matrix && topo)
      write_file(cfg.out_dir, "error_matrix.csv", error_matrix_csv(*topo, *em));
    if (export_failures && topo)
      write_file(cfg.out_dir, "failures.csv",
                 failure_assignment_csv(*topo, *fa));
  }
  return 0;
}

int cmd_simulate(const SharedFlags& f, std::int64_t samples,
                 const std::string& src, const std::string& dst) {
  ExperimentConfig cfg = to_config(f);
  Topology topo = prepare_topology(cfg);
  int case_id = cfg.cases.front();
  FailureCase fc = cfg.failure_free ? FailureCase{case_id, 0, 0, 0}
                                    : builtin_failure_case(case_id);
  FailureAssignment fa = sample_failures(
      topo, fc, trial_failure_seed(cfg.master_seed, 0, case_id));
  std::uint64_t sim_seed = trial_sim_seed(cfg.master_seed, 0, case_id);

  std::vector<std::pair<std::string, SimReport>> reports;
  if (!src.empty() || !dst.empty()) {
    if (src.empty() || dst.empty())
      throw std::invalid_argument("--src and --dst must be given together");
    int k = topo.require_index(src), v = topo.require_index(dst);
    PathRecord rec = best_control_path(topo, fa, k, v, cfg.reliability);
    SimReport rep =
        simulate_path(topo, rec.nodes, fa, samples, sim_seed, cfg.reliability);
    reports.push_back({src + "->" + dst, rep});
  } else {
    ErrorMatrix em = reliability_matrix(topo, fa, cfg.reliability);
    Instance inst = build_instance(topo, em, cfg.alphas.front());
    SolveResult r =
        cfg.run_exact
            ? solve_exact(inst)
            : solve_double_greedy(
                  inst, trial_greedy_seed(cfg.master_seed, 0, case_id));
    PlacementSimReport prep = simulate_placement(
        topo, em, inst, r.placement, fa, samples, sim_seed, cfg.reliability);
    for (int v = 0; v < inst.node_count(); ++v) {
      std::string label = inst.cand_ids[r.placement.assignment[v]] + "->" +
                          inst.node_ids[v];
      reports.push_back({label, prep.per_node[v]});
    }
    std::cerr << "aggregate: analytic "
              << format_double(prep.aggregate_analytic, 6) << ", estimate "
              << format_double(prep.aggregate_estimate, 6) << " +- "
              << format_double(prep.aggregate_std_error, 3) << "\n";
  }
  std::string csv = sim_reports_csv(reports);
  std::cout << csv;
  if (!cfg.out_dir.empty()) write_file(cfg.out_dir, "simulate.csv", csv);
  return 0;
}

int cmd_experiment(const SharedFlags& f, const std::string& config_path,
                   const CLI::App* cmd) {
  ExperimentConfig cfg;
  if (!config_path.empty()) {
    cfg = parse_config_file(config_path);
    // Explicitly passed flags override the file.
    ExperimentConfig flags = to_config(f);
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--topology")) {
      cfg.topology_path = flags.topology_path;
      cfg.topology_name = flags.topology_name;
    }
    if (given("--gateways")) cfg.gateway_ids = flags.gateway_ids;
    if (given("--gateway-count")) cfg.gateway_count = flags.gateway_count;
    if (given("--candidates")) cfg.candidate_ids = flags.candidate_ids;
    if (given("--max-candidates")) cfg.max_candidates = flags.max_candidates;
    if (given("--case")) cfg.cases = flags.cases;
    if (given("--alpha")) cfg.alphas = flags.alphas;
    if (given("--mode")) cfg.reliability.mode = flags.reliability.mode;
    if (given("--yen-k")) cfg.reliability.yen_k = flags.reliability.yen_k;
    if (given("--include-endpoints"))
      cfg.reliability.include_endpoints = true;
    if (given("--satellite-hop")) cfg.reliability.satellite_hop = true;
    if (given("--solver")) {
      cfg.run_exact = flags.run_exact;
      cfg.run_greedy = flags.run_greedy;
    }
    if (given("--repeats")) cfg.repeats = flags.repeats;
    if (given("--seed")) cfg.master_seed = flags.master_seed;
    if (given("--out")) cfg.out_dir = flags.out_dir;
    if (given("--jobs")) cfg.jobs = flags.jobs;
    if (given("--timing")) cfg.with_timing = true;
    if (given("--failure-free")) cfg.failure_free = true;
  } else {
    cfg = to_config(f);
  }
  if (cfg.out_dir.empty()) {
    const char* env = std::getenv("CTRLPLACE_OUT");
    cfg.out_dir = env ? env : "out";
  }
  ExperimentResult res = run_trials(cfg);
  write_file(cfg.out_dir, "trials.csv", trials_csv(res.trials, cfg.with_timing));
  write_file(cfg.out_dir, "summary.csv",
             summary_csv(res.summary, cfg.with_timing));
  if (f.pretty) std::cout << summary_csv(res.summary, cfg.with_timing);
  return 0;
}

int cmd_sweep(const SharedFlags& f) {
  ExperimentConfig cfg = to_config(f);
  std::vector<SweepRow> rows = alpha_sweep(cfg);
  std::string csv = sweep_csv(rows);
  std::cout << csv;
  if (!cfg.out_dir.empty()) {
    write_file(cfg.out_dir, "sweep.csv", csv);
    write_file(cfg.out_dir, "tradeoff.dat", sweep_dat(rows));
  }
  return 0;
}

int cmd_compare(const SharedFlags& f) {
  ExperimentConfig cfg = to_config(f);
  std::vector<GapRow> rows = compare_solvers(cfg);
  std::string csv = gaps_csv(rows, cfg.with_timing);
  std::cout << csv;
  if (!cfg.out_dir.empty()) {
    write_file(cfg.out_dir, "gaps.csv", csv);
    write_file(cfg.out_dir, "comparison.dat", gaps_dat(rows));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDN controller placement for satellite-terrestrial networks"};
  app.require_subcommand(1);

  SharedFlags f;
  bool strict = false;
  bool export_instance = false, export_matrix = false, export_failures = false;
  std::int64_t samples = 100000;
  std::string src, dst, config_path;

  CLI::App* inspect = app.add_subcommand("inspect", "load and validate a topology");
  add_shared(inspect, f, false);
  inspect->add_flag("--strict", strict,
                    "reject nodes without coordinates instead of dropping");

  CLI::App* solve = app.add_subcommand("solve", "solve one placement instance");
  add_shared(solve, f, false);
  solve->add_option("--solver", f.solver, "exact, greedy or both")
      ->check(CLI::IsMember({"exact", "greedy", "both"}));
  std::string instance_path;
  solve->add_option("--instance", instance_path,
                    "replay an exported instance bundle instead of building "
                    "one from the topology")
      ->excludes("--topology");
  solve->get_option("--topology")->required(false);
  solve->add_flag("--export-instance", export_instance,
                  "also write the replayable instance bundle");
  solve->add_flag("--export-matrix", export_matrix,
                  "also write the error-rate matrix");
  solve->add_flag("--export-failures", export_failures,
                  "also write the sampled failure probabilities");

  CLI::App* simulate =
      app.add_subcommand("simulate", "Monte Carlo check of control-path error rates");
  add_shared(simulate, f, false);
  simulate->add_option("--solver", f.solver, "placement solver (exact or greedy)")
      ->check(CLI::IsMember({"exact", "greedy", "both"}));
  simulate->add_option("--samples", samples, "samples per control path");
  simulate->add_option("--src", src, "simulate a single controller->node path");
  simulate->add_option("--dst", dst, "destination node for --src");

  CLI::App* experiment =
      app.add_subcommand("experiment", "repeated randomized trials -> trials.csv/summary.csv");
  add_shared(experiment, f, true);
  experiment->add_option("--config", config_path, "key = value config file")
      ->excludes("--topology");
  // --topology becomes optional when a config file is given.
  experiment->get_option("--topology")->required(false);
  experiment->add_option("--solver", f.solver, "exact, greedy or both")
      ->check(CLI::IsMember({"exact", "greedy", "both"}));

  CLI::App* sweep =
      app.add_subcommand("sweep", "exact-solver alpha sweep (shared failure draws)");
  add_shared(sweep, f, true);

  CLI::App* compare =
      app.add_subcommand("compare", "exact vs greedy gap table per failure case");
  add_shared(compare, f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand(inspect)) return cmd_inspect(f, strict);
    if (app.got_subcommand(solve)) {
      if (instance_path.empty() && f.topology.empty()) {
        std::cerr << "solve: either --topology or --instance is required\n";
        return 1;
      }
      return cmd_solve(f, instance_path, export_instance, export_matrix,
                       export_failures);
    }
    if (app.got_subcommand(simulate)) {
      if (f.solver == "both") f.solver = "exact";
      return cmd_simulate(f, samples, src, dst);
    }
    if (app.got_subcommand(experiment)) {
      if (config_path.empty() && f.topology.empty()) {
        std::cerr << "experiment: either --config or --topology is required\n";
        return 1;
      }
      return cmd_experiment(f, config_path, experiment);
    }
    if (app.got_subcommand(sweep)) return cmd_sweep(f);
    if (app.got_subcommand(compare)) return cmd_compare(f);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
