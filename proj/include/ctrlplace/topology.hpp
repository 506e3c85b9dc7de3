#ifndef CTRLPLACE_TOPOLOGY_HPP
#define CTRLPLACE_TOPOLOGY_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ctrlplace {

/// Great-circle (haversine) distance in km between two lat/lon points,
/// Earth radius 6371.0 km. Throws std::domain_error on coordinates outside
/// |lat| <= 90, |lon| <= 180.
double haversine_km(double lat_a, double lon_a, double lat_b, double lon_b);

struct Node {
  std::string id;     // GraphML node id
  std::string label;  // human-readable name, may be empty
  double lat = 0.0;
  double lon = 0.0;
};

struct Edge {
  int u = -1;  // node indices with u < v
  int v = -1;
  double length_km = 0.0;
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Undirected simple connected graph over geo-located nodes, plus the
/// candidate-controller and gateway node sets. Immutable after construction
/// and safe to share across threads.
class Topology {
 public:
  /// Validates: no self loops, no parallel edges, endpoints declared,
  /// positive finite lengths, connectedness, candidates/gateways are known
  /// nodes. Nodes are reordered canonically (numeric ids sort numerically,
  /// otherwise lexicographically).
  Topology(std::vector<Node> nodes, std::vector<Edge> edges);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  const std::string& id(int node) const { return nodes_[node].id; }
  int index_of(const std::string& id) const;           // -1 if unknown
  int require_index(const std::string& id) const;      // throws if unknown

  struct Neighbor {
    int node;
    int edge;
    double length_km;
  };
  const std::vector<Neighbor>& neighbors(int node) const {
    return adjacency_[node];
  }
  /// Edge index for unordered pair (a, b), or -1.
  int edge_between(int a, int b) const;

  const std::vector<int>& candidates() const { return candidates_; }
  const std::vector<int>& gateways() const { return gateways_; }
  bool is_gateway(int node) const;

  /// Both setters take node ids, validate membership, and keep the stored
  /// sets sorted by node index. Candidate set must stay nonempty.
  void set_candidates(const std::vector<std::string>& ids);
  void set_gateways(const std::vector<std::string>& ids);
  void set_candidate_indices(std::vector<int> idx);
  void set_gateway_indices(std::vector<int> idx);

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<int> candidates_;  // sorted node indices, nonempty
  std::vector<int> gateways_;    // sorted node indices
};

struct GraphmlOptions {
  /// strict: a node without Latitude/Longitude is an error.
  /// Otherwise such nodes are dropped together with their edges.
  bool strict_coordinates = false;
  /// Sink for loader warnings (dropped nodes, collapsed parallel edges,
  /// discarded components); nullptr silences them.
  std::vector<std::string>* warnings = nullptr;
};

class GraphmlError : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

/// Parses Topology-Zoo-style GraphML (node keys Latitude/Longitude, optional
/// label). Keeps the largest connected component, collapses parallel edges
/// to the shortest, drops self loops. Candidate set defaults to all nodes,
/// gateway set starts empty. Link lengths are haversine distances between
/// endpoint coordinates.
Topology load_graphml(const std::string& xml, const GraphmlOptions& opts = {});
Topology load_graphml_file(const std::string& path,
                           const GraphmlOptions& opts = {});

/// Serializes with the same key conventions load_graphml understands;
/// load_graphml(write_graphml(t)) reproduces t's node and edge sets.
std::string write_graphml(const Topology& topo);

/// Closed sampling intervals [0, upper] for component failure probabilities.
struct FailureCase {
  int case_id = 0;
  double node_upper = 0.0;
  double edge_upper = 0.0;
  double sat_upper = 0.0;
};

/// The four built-in failure settings (ids 1..4).
const FailureCase& builtin_failure_case(int case_id);

/// One sampled failure probability per node, edge and gateway satellite
/// link of a fixed Topology. Immutable after construction.
struct FailureAssignment {
  std::vector<double> node_fail;  // by node index
  std::vector<double> edge_fail;  // by edge index
  std::vector<double> sat_fail;   // by position in topo.gateways()
};

/// Independent uniform draws from the case intervals; deterministic in seed.
FailureAssignment sample_failures(const Topology& topo, const FailureCase& fc,
                                  std::uint64_t seed);

/// CSV with columns kind(node|edge|sat), id, probability. Edge ids are
/// "u|v" with the endpoints in canonical order.
std::string failure_assignment_csv(const Topology& topo,
                                   const FailureAssignment& fa);

/// Newline-delimited node-id list; '#' starts a comment, blanks ignored.
std::vector<std::string> read_id_list(const std::string& path);

}  // namespace ctrlplace

#endif  // CTRLPLACE_TOPOLOGY_HPP
