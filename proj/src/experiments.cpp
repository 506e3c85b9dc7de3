#include "ctrlplace/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>

#include "ctrlplace/csv.hpp"
#include "ctrlplace/rng.hpp"

namespace ctrlplace {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!trim(cur).empty()) out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty()) out.push_back(trim(cur));
  return out;
}

std::vector<std::string> id_list_value(const std::string& value) {
  if (!value.empty() && value[0] == '@') return read_id_list(value.substr(1));
  return split_list(value);
}

std::string file_stem(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = name.find_last_of('.');
  return dot == std::string::npos ? name : name.substr(0, dot);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master, int repeat) {
  return derive_seed(master, static_cast<std::uint64_t>(repeat));
}
std::uint64_t trial_failure_seed(std::uint64_t master, int repeat,
                                 int case_id) {
  return derive_seed(trial_seed(master, repeat),
                     3 * static_cast<std::uint64_t>(case_id));
}
std::uint64_t trial_greedy_seed(std::uint64_t master, int repeat,
                                int case_id) {
  return derive_seed(trial_seed(master, repeat),
                     3 * static_cast<std::uint64_t>(case_id) + 1);
}
std::uint64_t trial_sim_seed(std::uint64_t master, int repeat, int case_id) {
  return derive_seed(trial_seed(master, repeat),
                     3 * static_cast<std::uint64_t>(case_id) + 2);
}

namespace {

Topology prepare_topology_impl(const ExperimentConfig& cfg) {
  Topology topo = load_graphml_file(cfg.topology_path);
  if (!cfg.gateway_ids.empty()) {
    topo.set_gateways(cfg.gateway_ids);
  } else {
    if (cfg.gateway_count < 1 || cfg.gateway_count > topo.node_count())
      throw std::invalid_argument("gateway count out of range");
    topo.set_gateway_indices(place_gateways_fallback(topo, cfg.gateway_count));
  }
  if (!cfg.candidate_ids.empty()) {
    topo.set_candidates(cfg.candidate_ids);
  } else if (cfg.max_candidates) {
    int cap = std::min(*cfg.max_candidates, topo.node_count());
    if (cap < 1) throw std::invalid_argument("max_candidates must be >= 1");
    std::vector<int> idx(cap);
    for (int i = 0; i < cap; ++i) idx[i] = i;
    topo.set_candidate_indices(std::move(idx));
  }
  if (static_cast<int>(topo.candidates().size()) > 64)
    throw std::invalid_argument(
        "candidate set exceeds 64; restrict it with candidates/max_candidates");
  return topo;
}

struct TrialOutput {
  std::vector<TrialRow> rows;
};

TrialOutput run_one_repeat(const ExperimentConfig& cfg, const Topology& topo,
                           int repeat) {
  TrialOutput out;
  for (int case_id : cfg.cases) {
    const FailureCase& fc = builtin_failure_case(case_id);
    FailureCase used = cfg.failure_free ? FailureCase{case_id, 0, 0, 0} : fc;
    std::uint64_t fseed = trial_failure_seed(cfg.master_seed, repeat, case_id);
    FailureAssignment fa = sample_failures(topo, used, fseed);
    ErrorMatrix em = reliability_matrix(topo, fa, cfg.reliability);
    Instance base = build_instance(topo, em, cfg.alphas.front());
    for (double alpha : cfg.alphas) {
      Instance inst = base;
      inst.alpha = alpha;
      inst.w_bar = upper_bound(alpha, inst.d, inst.node_count());
      std::vector<SolveResult> results;
      if (cfg.run_exact) results.push_back(solve_exact(inst));
      if (cfg.run_greedy)
        results.push_back(solve_double_greedy(
            inst, trial_greedy_seed(cfg.master_seed, repeat, case_id)));
      for (const SolveResult& r : results) {
        // Internal consistency: the stored placement must re-validate and
        // re-evaluate to the reported objective.
        r.placement.validate(inst);
        uint64_t mask = placed_mask(r.placement);
        double w = eval_w(inst, mask);
        if (std::abs(w - r.w) > 1e-9 * std::max(1.0, std::abs(w)))
          throw std::logic_error("solver result fails re-evaluation");

        TrialRow row;
        row.topology = cfg.topology_name;
        row.case_id = case_id;
        row.alpha = alpha;
        row.solver = r.solver;
        row.seed = fseed;
        row.n_controllers = static_cast<int>(r.placement.placed.size());
        row.w = r.w;
        row.wc = r.wc;
        row.wr = r.wr;
        row.avg_reliability = 1.0 - r.wr / inst.node_count();
        row.d_avg = r.wc / row.n_controllers;
        row.elapsed_s = r.elapsed_s;
        row.evaluations = r.evaluations;
        std::string placed;
        for (std::size_t i = 0; i < r.placement.placed.size(); ++i) {
          if (i) placed += ';';
          placed += inst.cand_ids[r.placement.placed[i]];
        }
        row.placed = placed;
        out.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / xs.size();
}

double stddev_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / (xs.size() - 1));
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool solvers_set = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "topology") {
      cfg.topology_path = value;
    } else if (key == "name") {
      cfg.topology_name = value;
    } else if (key == "gateways") {
      cfg.gateway_ids = id_list_value(value);
    } else if (key == "gateway_count") {
      cfg.gateway_count = std::stoi(value);
    } else if (key == "candidates") {
      cfg.candidate_ids = id_list_value(value);
    } else if (key == "max_candidates") {
      cfg.max_candidates = std::stoi(value);
    } else if (key == "cases") {
      cfg.cases.clear();
      for (const auto& c : split_list(value)) cfg.cases.push_back(std::stoi(c));
    } else if (key == "alpha" || key == "alphas") {
      cfg.alphas.clear();
      for (const auto& a : split_list(value))
        cfg.alphas.push_back(std::stod(a));
    } else if (key == "mode") {
      if (value == "exact-reliable")
        cfg.reliability.mode = PathMode::kExactReliable;
      else if (value == "yen-k")
        cfg.reliability.mode = PathMode::kYenK;
      else
        throw std::invalid_argument("config: unknown mode '" + value + "'");
    } else if (key == "yen_k") {
      cfg.reliability.yen_k = std::stoi(value);
    } else if (key == "include_endpoints") {
      cfg.reliability.include_endpoints = value == "1" || value == "true";
    } else if (key == "satellite_hop") {
      cfg.reliability.satellite_hop = value == "1" || value == "true";
    } else if (key == "solvers") {
      cfg.run_exact = cfg.run_greedy = false;
      for (const auto& s : split_list(value)) {
        if (s == "exact")
          cfg.run_exact = true;
        else if (s == "greedy")
          cfg.run_greedy = true;
        else
          throw std::invalid_argument("config: unknown solver '" + s + "'");
      }
      solvers_set = true;
    } else if (key == "repeats") {
      cfg.repeats = std::stoi(value);
    } else if (key == "seed") {
      cfg.master_seed = std::stoull(value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "jobs") {
      cfg.jobs = std::stoi(value);
    } else if (key == "timing") {
      cfg.with_timing = value == "1" || value == "true";
    } else if (key == "failure_free") {
      cfg.failure_free = value == "1" || value == "true";
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "'");
    }
  }
  if (cfg.topology_path.empty())
    throw std::invalid_argument("config: topology is required");
  if (cfg.topology_name.empty())
    cfg.topology_name = file_stem(cfg.topology_path);
  if (solvers_set && !cfg.run_exact && !cfg.run_greedy)
    throw std::invalid_argument("config: at least one solver required");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

Topology prepare_topology(const ExperimentConfig& config) {
  return prepare_topology_impl(config);
}

std::vector<int> place_gateways_fallback(const Topology& topo, int count) {
  if (count < 1 || count > topo.node_count())
    throw std::invalid_argument("gateway count out of range");
  const int n = topo.node_count();
  // Row i holds shortest latencies from node i.
  std::vector<std::vector<double>> dist;
  dist.reserve(n);
  for (int i = 0; i < n; ++i) dist.push_back(latency_distances_from(topo, i));

  std::vector<int> chosen;
  std::vector<char> is_chosen(n, 0);
  std::vector<double> best_dist(n, std::numeric_limits<double>::infinity());
  for (int step = 0; step < count; ++step) {
    int best_node = -1;
    double best_total = std::numeric_limits<double>::infinity();
    for (int g = 0; g < n; ++g) {
      if (is_chosen[g]) continue;
      double total = 0.0;
      for (int v = 0; v < n; ++v) total += std::min(best_dist[v], dist[g][v]);
      if (total < best_total) {
        best_total = total;
        best_node = g;
      }
    }
    chosen.push_back(best_node);
    is_chosen[best_node] = 1;
    for (int v = 0; v < n; ++v)
      best_dist[v] = std::min(best_dist[v], dist[best_node][v]);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

ExperimentResult run_trials(const ExperimentConfig& cfg) {
  if (cfg.repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  for (double a : cfg.alphas)
    if (!(a > 0.0)) throw std::invalid_argument("alpha values must be > 0");
  if (cfg.alphas.empty()) throw std::invalid_argument("no alpha configured");
  if (!cfg.run_exact && !cfg.run_greedy)
    throw std::invalid_argument("no solver configured");

  Topology topo = prepare_topology_impl(cfg);

  std::vector<TrialOutput> outputs(cfg.repeats);
  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (int r = 0; r < cfg.repeats; ++r)
      outputs[r] = run_one_repeat(cfg, topo, r);
  } else {
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    for (int j = 0; j < jobs; ++j)
      futures.push_back(std::async(std::launch::async, [&]() {
        while (true) {
          int r = next.fetch_add(1);
          if (r >= cfg.repeats) break;
          outputs[r] = run_one_repeat(cfg, topo, r);
        }
      }));
    for (auto& f : futures) f.get();
  }

  ExperimentResult result;
  for (const TrialOutput& o : outputs)
    result.trials.insert(result.trials.end(), o.rows.begin(), o.rows.end());

  // Summaries per (case, alpha, solver), in the configured order.
  std::vector<std::string> solver_names;
  if (cfg.run_exact) solver_names.push_back("exact");
  if (cfg.run_greedy) solver_names.push_back("greedy");
  for (int case_id : cfg.cases) {
    for (double alpha : cfg.alphas) {
      for (const std::string& solver : solver_names) {
        std::vector<double> n, w, wc, wr, rel, el;
        for (const TrialRow& row : result.trials) {
          if (row.case_id != case_id || row.alpha != alpha ||
              row.solver != solver)
            continue;
          n.push_back(row.n_controllers);
          w.push_back(row.w);
          wc.push_back(row.wc);
          wr.push_back(row.wr);
          rel.push_back(row.avg_reliability);
          el.push_back(row.elapsed_s);
        }
        if (n.empty()) continue;
        SummaryRow s;
        s.topology = cfg.topology_name;
        s.case_id = case_id;
        s.alpha = alpha;
        s.solver = solver;
        s.repeats = static_cast<int>(n.size());
        s.mean_n = mean_of(n);
        s.mean_w = mean_of(w);
        s.std_w = stddev_of(w, s.mean_w);
        s.mean_wc = mean_of(wc);
        s.std_wc = stddev_of(wc, s.mean_wc);
        s.mean_wr = mean_of(wr);
        s.std_wr = stddev_of(wr, s.mean_wr);
        s.mean_reliability = mean_of(rel);
        s.std_reliability = stddev_of(rel, s.mean_reliability);
        s.mean_elapsed_s = mean_of(el);
        result.summary.push_back(s);
      }
    }
  }
  return result;
}

std::vector<SweepRow> alpha_sweep(const ExperimentConfig& config) {
  if (config.alphas.size() < 2)
    throw std::invalid_argument("alpha sweep needs at least two alphas");
  ExperimentConfig cfg = config;
  cfg.run_exact = true;
  cfg.run_greedy = false;
  cfg.cases = {config.cases.front()};
  std::vector<double> alphas = cfg.alphas;
  std::sort(alphas.begin(), alphas.end());
  cfg.alphas = alphas;

  ExperimentResult res = run_trials(cfg);
  std::vector<SweepRow> rows;
  for (const SummaryRow& s : res.summary) {
    SweepRow r;
    r.alpha = s.alpha;
    r.mean_n = s.mean_n;
    r.mean_wc = s.mean_wc;
    r.mean_wr = s.mean_wr;
    rows.push_back(r);
  }
  return rows;
}

std::vector<GapRow> compare_solvers(const ExperimentConfig& config) {
  ExperimentConfig cfg = config;
  cfg.run_exact = true;
  cfg.run_greedy = true;
  cfg.alphas = {config.alphas.front()};

  ExperimentResult res = run_trials(cfg);

  // w_bar is a pure function of the topology and alpha, so per-solver mean
  // w_tilde values are recoverable from the mean objectives.
  Topology topo = prepare_topology_impl(cfg);
  std::vector<double> d;
  for (int k : topo.candidates()) d.push_back(gateway_distance(topo, k));
  double w_bar = upper_bound(cfg.alphas.front(), d, topo.node_count());

  std::vector<GapRow> rows;
  for (int case_id : cfg.cases) {
    const SummaryRow* exact = nullptr;
    const SummaryRow* greedy = nullptr;
    for (const SummaryRow& s : res.summary) {
      if (s.case_id != case_id) continue;
      if (s.solver == "exact") exact = &s;
      if (s.solver == "greedy") greedy = &s;
    }
    if (!exact || !greedy) continue;
    GapRow g;
    g.case_id = case_id;
    g.mean_w_exact = exact->mean_w;
    g.mean_w_greedy = greedy->mean_w;
    if (exact->mean_w != 0.0)
      g.objective_gap = (greedy->mean_w - exact->mean_w) / exact->mean_w;
    else
      g.objective_gap = greedy->mean_w == 0.0
                            ? 0.0
                            : std::numeric_limits<double>::infinity();
    double wt_exact = w_bar - exact->mean_w;
    double wt_greedy = w_bar - greedy->mean_w;
    g.surrogate_gap = wt_exact != 0.0 ? (wt_exact - wt_greedy) / wt_exact
                                      : (wt_greedy == 0.0 ? 0.0 : -1.0);
    g.mean_rel_exact = exact->mean_reliability;
    g.mean_rel_greedy = greedy->mean_reliability;
    g.reliability_gap = exact->mean_reliability - greedy->mean_reliability;
    g.mean_elapsed_exact_s = exact->mean_elapsed_s;
    g.mean_elapsed_greedy_s = greedy->mean_elapsed_s;
    std::vector<double> ev_exact, ev_greedy;
    for (const TrialRow& row : res.trials) {
      if (row.case_id != case_id) continue;
      (row.solver == "exact" ? ev_exact : ev_greedy)
          .push_back(static_cast<double>(row.evaluations));
    }
    if (!ev_exact.empty()) g.mean_evals_exact = mean_of(ev_exact);
    if (!ev_greedy.empty()) g.mean_evals_greedy = mean_of(ev_greedy);
    rows.push_back(g);
  }
  return rows;
}

std::string trials_csv(const std::vector<TrialRow>& rows, bool with_timing) {
  std::string out =
      "topology,case,alpha,solver,seed,n_controllers,w,wc,wr,"
      "avg_reliability,d_avg,elapsed,evaluations,placed\n";
  for (const TrialRow& r : rows)
    out += csv_join({r.topology, std::to_string(r.case_id),
                     format_double(r.alpha), r.solver, std::to_string(r.seed),
                     std::to_string(r.n_controllers), format_double(r.w),
                     format_double(r.wc), format_double(r.wr),
                     format_double(r.avg_reliability), format_double(r.d_avg),
                     format_double(with_timing ? r.elapsed_s : 0.0),
                     std::to_string(r.evaluations), r.placed}) +
           "\n";
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows, bool with_timing) {
  std::string out =
      "topology,case,alpha,solver,repeats,mean_n,mean_w,std_w,mean_wc,std_wc,"
      "mean_wr,std_wr,mean_reliability,std_reliability,mean_elapsed\n";
  for (const SummaryRow& r : rows)
    out += csv_join(
               {r.topology, std::to_string(r.case_id), format_double(r.alpha),
                r.solver, std::to_string(r.repeats), format_double(r.mean_n),
                format_double(r.mean_w), format_double(r.std_w),
                format_double(r.mean_wc), format_double(r.std_wc),
                format_double(r.mean_wr), format_double(r.std_wr),
                format_double(r.mean_reliability),
                format_double(r.std_reliability),
                format_double(with_timing ? r.mean_elapsed_s : 0.0)}) +
           "\n";
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "alpha,mean_n,mean_wc,mean_wr\n";
  for (const SweepRow& r : rows)
    out += csv_join({format_double(r.alpha), format_double(r.mean_n),
                     format_double(r.mean_wc), format_double(r.mean_wr)}) +
           "\n";
  return out;
}

std::string gaps_csv(const std::vector<GapRow>& rows, bool with_timing) {
  std::string out =
      "case,mean_w_exact,mean_w_greedy,objective_gap,surrogate_gap,"
      "mean_rel_exact,mean_rel_greedy,reliability_gap,elapsed_exact,"
      "elapsed_greedy,evals_exact,evals_greedy\n";
  for (const GapRow& r : rows)
    out += csv_join(
               {std::to_string(r.case_id), format_double(r.mean_w_exact),
                format_double(r.mean_w_greedy), format_double(r.objective_gap),
                format_double(r.surrogate_gap),
                format_double(r.mean_rel_exact),
                format_double(r.mean_rel_greedy),
                format_double(r.reliability_gap),
                format_double(with_timing ? r.mean_elapsed_exact_s : 0.0),
                format_double(with_timing ? r.mean_elapsed_greedy_s : 0.0),
                format_double(r.mean_evals_exact),
                format_double(r.mean_evals_greedy)}) +
           "\n";
  return out;
}

std::string sweep_dat(const std::vector<SweepRow>& rows) {
  std::string out = "# alpha mean_wc mean_wr mean_n\n";
  for (const SweepRow& r : rows)
    out += format_double(r.alpha) + " " + format_double(r.mean_wc) + " " +
           format_double(r.mean_wr) + " " + format_double(r.mean_n) + "\n";
  return out;
}

std::string gaps_dat(const std::vector<GapRow>& rows) {
  std::string out =
      "# case w_exact w_greedy rel_exact rel_greedy\n";
  for (const GapRow& r : rows)
    out += std::to_string(r.case_id) + " " + format_double(r.mean_w_exact) +
           " " + format_double(r.mean_w_greedy) + " " +
           format_double(r.mean_rel_exact) + " " +
           format_double(r.mean_rel_greedy) + "\n";
  return out;
}

}  // namespace ctrlplace
