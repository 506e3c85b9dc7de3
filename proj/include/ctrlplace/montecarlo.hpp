#ifndef CTRLPLACE_MONTECARLO_HPP
#define CTRLPLACE_MONTECARLO_HPP

#include <cstdint>
#include <vector>

#include "ctrlplace/objective.hpp"
#include "ctrlplace/reliability.hpp"
#include "ctrlplace/topology.hpp"

namespace ctrlplace {

/// Stochastic estimate of a control-path error rate next to its analytic
/// value, with the binomial standard error sqrt(p(1-p)/n).
struct SimReport {
  std::int64_t samples = 0;
  double estimated_error = 0.0;
  double analytic_error = 0.0;
  double std_error = 0.0;
};

/// Draws independent up/down states for every member edge and counted node
/// of the path; the path fails when any member fails. Each sample uses its
/// own seed derived from (seed, sample index), so results do not depend on
/// any batching of the sample loop. samples >= 1 required.
SimReport simulate_path(const Topology& topo, const std::vector<int>& path,
                        const FailureAssignment& fa, std::int64_t samples,
                        std::uint64_t seed,
                        const ReliabilityOptions& opts = {});

struct PlacementSimReport {
  std::vector<SimReport> per_node;  // by node index
  double aggregate_estimate = 0.0;  // mean estimated error over nodes
  double aggregate_analytic = 0.0;  // mean analytic error (wr / |V|)
  double aggregate_std_error = 0.0;
};

/// Simulates every assigned control path of a placement and aggregates the
/// mean failure fraction for comparison with eval_wr / |V|.
PlacementSimReport simulate_placement(const Topology& topo,
                                      const ErrorMatrix& em,
                                      const Instance& inst,
                                      const Placement& placement,
                                      const FailureAssignment& fa,
                                      std::int64_t samples, std::uint64_t seed,
                                      const ReliabilityOptions& opts = {});

/// CSV: path id, samples, analytic, estimate, std_error.
std::string sim_reports_csv(const std::vector<std::pair<std::string, SimReport>>&
                                labeled_reports);

}  // namespace ctrlplace

#endif  // CTRLPLACE_MONTECARLO_HPP
