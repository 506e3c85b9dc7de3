#include "ctrlplace/montecarlo.hpp"

#include <cmath>
#include <stdexcept>

#include "ctrlplace/csv.hpp"
#include "ctrlplace/rng.hpp"

namespace ctrlplace {

namespace {

// Failure probabilities of the path's members, in a fixed draw order:
// edges along the path, counted nodes along the path, then the satellite
// factor when it applies. Mirrors the factors of the analytic product.
std::vector<double> member_probabilities(const Topology& topo,
                                         const std::vector<int>& path,
                                         const FailureAssignment& fa,
                                         const ReliabilityOptions& opts) {
  std::vector<double> probs;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    int e = topo.edge_between(path[i], path[i + 1]);
    if (e < 0)
      throw TopologyError("simulate_path: path step is not an edge");
    probs.push_back(fa.edge_fail[e]);
  }
  if (opts.include_endpoints) {
    for (int v : path) probs.push_back(fa.node_fail[v]);
  } else {
    for (std::size_t i = 1; i + 1 < path.size(); ++i)
      probs.push_back(fa.node_fail[path[i]]);
  }
  if (opts.satellite_hop) {
    const auto& gws = topo.gateways();
    for (std::size_t g = 0; g < gws.size(); ++g)
      if (gws[g] == path.back()) {
        probs.push_back(fa.sat_fail[g]);
        break;
      }
  }
  return probs;
}

}  // namespace

SimReport simulate_path(const Topology& topo, const std::vector<int>& path,
                        const FailureAssignment& fa, std::int64_t samples,
                        std::uint64_t seed, const ReliabilityOptions& opts) {
  if (samples < 1)
    throw std::invalid_argument("simulate_path: samples must be >= 1");
  if (path.empty())
    throw std::invalid_argument("simulate_path: empty path");

  std::vector<double> probs = member_probabilities(topo, path, fa, opts);

  // Each sample derives its own generator from (seed, sample index), so
  // partial sums over any sample partition reproduce the serial result.
  std::int64_t failures = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    bool failed = false;
    for (double p : probs)
      if (rng.next_double() < p) {
        failed = true;
        break;
      }
    failures += failed ? 1 : 0;
  }

  SimReport rep;
  rep.samples = samples;
  rep.estimated_error = static_cast<double>(failures) / samples;
  rep.analytic_error = path_error_rate(topo, path, fa, opts);
  rep.std_error = std::sqrt(rep.estimated_error * (1.0 - rep.estimated_error) /
                            samples);
  return rep;
}

PlacementSimReport simulate_placement(const Topology& topo,
                                      const ErrorMatrix& em,
                                      const Instance& inst,
                                      const Placement& placement,
                                      const FailureAssignment& fa,
                                      std::int64_t samples, std::uint64_t seed,
                                      const ReliabilityOptions& opts) {
  placement.validate(inst);
  if (em.node_count() != inst.node_count() ||
      em.candidate_count() != inst.candidate_count())
    throw std::invalid_argument("simulate_placement: matrix/instance mismatch");

  PlacementSimReport rep;
  rep.per_node.reserve(inst.node_count());
  double sum_est = 0.0, sum_ana = 0.0, sum_var = 0.0;
  for (int v = 0; v < inst.node_count(); ++v) {
    int c = placement.assignment[v];
    const PathRecord& path = em.path(c, v);
    SimReport r = simulate_path(topo, path.nodes, fa, samples,
                                derive_seed(seed, static_cast<std::uint64_t>(v)),
                                opts);
    sum_est += r.estimated_error;
    sum_ana += r.analytic_error;
    sum_var += r.std_error * r.std_error;
    rep.per_node.push_back(r);
  }
  int n = inst.node_count();
  rep.aggregate_estimate = sum_est / n;
  rep.aggregate_analytic = sum_ana / n;
  rep.aggregate_std_error = std::sqrt(sum_var) / n;
  return rep;
}

std::string sim_reports_csv(
    const std::vector<std::pair<std::string, SimReport>>& labeled_reports) {
  std::string out = "path,samples,analytic,estimate,std_error\n";
  for (const auto& [label, r] : labeled_reports)
    out += csv_join({label, std::to_string(r.samples),
                     format_double(r.analytic_error),
                     format_double(r.estimated_error),
                     format_double(r.std_error)}) +
           "\n";
  return out;
}

}  // namespace ctrlplace
