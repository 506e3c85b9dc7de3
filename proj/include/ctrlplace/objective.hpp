#ifndef CTRLPLACE_OBJECTIVE_HPP
#define CTRLPLACE_OBJECTIVE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ctrlplace/reliability.hpp"
#include "ctrlplace/topology.hpp"

namespace ctrlplace {

/// Frozen inputs of one placement solve: the per-(candidate, node) error
/// rates, the candidate-to-gateway latencies d_k, the latency weight alpha,
/// and the upper bound w_bar that makes the surrogate w_tilde nonnegative.
/// Candidate sets are uint64 bitmasks over candidate positions, so at most
/// 64 candidates per instance.
struct Instance {
  std::vector<std::string> node_ids;
  std::vector<std::string> cand_ids;
  std::vector<double> e;  // row-major [candidate][node] error rates
  std::vector<double> d;  // per candidate, km
  double alpha = 1.0;
  double w_bar = 0.0;

  int node_count() const { return static_cast<int>(node_ids.size()); }
  int candidate_count() const { return static_cast<int>(cand_ids.size()); }
  double error(int cand, int node) const {
    return e[static_cast<std::size_t>(cand) * node_ids.size() + node];
  }
  uint64_t full_mask() const {
    int k = candidate_count();
    return k == 64 ? ~0ULL : ((1ULL << k) - 1);
  }
  /// Checks alpha > 0, matrix/d shapes, and error rates within [0, 1].
  void validate() const;
};

/// W_bar = alpha * sum_k d_k + |V|; an upper bound on the objective over
/// every placement, so w_tilde stays nonnegative.
double upper_bound(double alpha, const std::vector<double>& d, int n_nodes);

/// Builds an Instance from a prepared topology: d_k from gateway_distance,
/// error rates from em, w_bar from upper_bound.
Instance build_instance(const Topology& topo, const ErrorMatrix& em,
                        double alpha);

/// Sum of d_k over placed candidates; empty set yields 0.
double eval_wc(const Instance& inst, uint64_t placed);

/// Sum over nodes of the smallest error rate offered by a placed candidate;
/// the empty set charges every node the maximal error 1, i.e. |V|.
double eval_wr(const Instance& inst, uint64_t placed);

/// alpha * eval_wc + eval_wr.
double eval_w(const Instance& inst, uint64_t placed);

/// w_bar - eval_w; nonnegative for every subset including the empty one.
double w_tilde(const Instance& inst, uint64_t placed);

/// Per-node argmin over placed candidates, ties to the smallest candidate
/// position (and therefore the smallest candidate id). Empty set is a
/// domain error. Returned vector maps node index -> candidate position.
std::vector<int> optimal_assignment(const Instance& inst, uint64_t placed);

/// A feasible solution: nonempty placed candidate set plus a full
/// node-to-controller assignment into that set.
struct Placement {
  std::vector<int> placed;      // candidate positions, sorted
  std::vector<int> assignment;  // node index -> candidate position

  /// Throws std::invalid_argument when any feasibility rule is violated:
  /// empty placement, placement outside the candidate range, a node
  /// assigned to an unplaced candidate, or a missing assignment.
  void validate(const Instance& inst) const;
};

Placement make_placement(const Instance& inst, uint64_t placed);

uint64_t placed_mask(const Placement& p);

/// Instance export/import as a CSV bundle so runs can be replayed
/// bit-exactly: an error-matrix block, a d_k block, and scalar config.
std::string instance_to_csv(const Instance& inst);
Instance instance_from_csv(const std::string& text);

}  // namespace ctrlplace

#endif  // CTRLPLACE_OBJECTIVE_HPP
