#ifndef CTRLPLACE_RELIABILITY_HPP
#define CTRLPLACE_RELIABILITY_HPP

#include <string>
#include <vector>

#include "ctrlplace/topology.hpp"

namespace ctrlplace {

/// A simple path with its latency and control-path error rate. A
/// single-node path (src == dst) has latency 0 and error rate 0 under the
/// default intermediate-node counting. Operations that take no failure
/// assignment (shortest_latency_path, yen_k_paths) leave error_rate at 0.
struct PathRecord {
  std::vector<int> nodes;  // node indices, endpoints inclusive
  double latency_km = 0.0;
  double error_rate = 0.0;
};

/// Minimum-latency simple path. Ties are broken toward the
/// lexicographically smallest node-index sequence. Throws TopologyError if
/// dst is unreachable (cannot happen for a valid connected Topology).
PathRecord shortest_latency_path(const Topology& topo, int src, int dst);

/// Yen's k shortest loopless paths, nondecreasing latency, first element
/// equal to shortest_latency_path, latency ties broken lexicographically
/// by node sequence. Returns fewer than k paths when the graph has fewer
/// simple src-dst paths. k == 0 is a domain error.
std::vector<PathRecord> yen_k_paths(const Topology& topo, int src, int dst,
                                    int k);

enum class PathMode {
  kExactReliable,  // minimum error rate over all simple paths
  kYenK,           // minimum error rate among the yen_k shortest-latency paths
};

struct ReliabilityOptions {
  PathMode mode = PathMode::kExactReliable;
  int yen_k = 5;  // candidate-path count for PathMode::kYenK
  /// Default counts only intermediate nodes in the error product, so a
  /// controller co-located with a switch has error 0. When true, endpoint
  /// node failures are included as well.
  bool include_endpoints = false;
  /// When true, a control path whose switch-side endpoint hosts a gateway
  /// also carries that gateway's satellite-link failure factor.
  bool satellite_hop = false;
};

/// Error rate of one control path: one minus the product of survival
/// probabilities of its edges and counted nodes.
double path_error_rate(const Topology& topo, const std::vector<int>& path,
                       const FailureAssignment& fa,
                       const ReliabilityOptions& opts = {});

/// Best control path from candidate k to node v under opts.mode; the
/// returned record carries both the latency and the error rate. When every
/// path has error rate 1 a path is still returned (error_rate == 1).
PathRecord best_control_path(const Topology& topo, const FailureAssignment& fa,
                             int k, int v, const ReliabilityOptions& opts = {});

/// Best control-path error rate for every (candidate, node) pair.
class ErrorMatrix {
 public:
  ErrorMatrix() = default;
  ErrorMatrix(int n_candidates, int n_nodes, std::string mode_tag);

  double at(int cand, int node) const { return e_[cand * n_nodes_ + node]; }
  const PathRecord& path(int cand, int node) const {
    return paths_[cand * n_nodes_ + node];
  }
  void set(int cand, int node, PathRecord rec);

  int candidate_count() const { return n_candidates_; }
  int node_count() const { return n_nodes_; }
  const std::string& mode_tag() const { return mode_tag_; }

 private:
  int n_candidates_ = 0;
  int n_nodes_ = 0;
  std::string mode_tag_;
  std::vector<double> e_;
  std::vector<PathRecord> paths_;
};

/// Populates every (k, v) pair via best_control_path. Pure function of its
/// inputs; row order follows topo.candidates().
ErrorMatrix reliability_matrix(const Topology& topo,
                               const FailureAssignment& fa,
                               const ReliabilityOptions& opts = {});

/// d_k: least shortest-path latency from candidate k to any gateway.
/// Throws TopologyError when the gateway set is empty.
double gateway_distance(const Topology& topo, int k);

/// Shortest-path latency from src to every node (one Dijkstra sweep).
std::vector<double> latency_distances_from(const Topology& topo, int src);

/// CSV columns k, v, error_rate, path (semicolon-joined node ids), with
/// 12-significant-digit decimal formatting.
std::string error_matrix_csv(const Topology& topo, const ErrorMatrix& em);

}  // namespace ctrlplace

#endif  // CTRLPLACE_RELIABILITY_HPP
