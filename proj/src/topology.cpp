#include "ctrlplace/topology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ctrlplace/csv.hpp"
#include "ctrlplace/rng.hpp"

namespace ctrlplace {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kPi = 3.14159265358979323846;

bool is_numeric_id(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

// Numeric ids sort numerically so "10" comes after "2"; mixed corpora fall
// back to plain string order.
bool id_less(const std::string& a, const std::string& b) {
  bool na = is_numeric_id(a), nb = is_numeric_id(b);
  if (na && nb) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  }
  if (na != nb) return na;
  return a < b;
}

void warn(const GraphmlOptions& opts, std::string msg) {
  if (opts.warnings) opts.warnings->push_back(std::move(msg));
}

}  // namespace

double haversine_km(double lat_a, double lon_a, double lat_b, double lon_b) {
  auto bad = [](double lat, double lon) {
    return !(std::abs(lat) <= 90.0) || !(std::abs(lon) <= 180.0);
  };
  if (bad(lat_a, lon_a) || bad(lat_b, lon_b))
    throw std::domain_error("haversine_km: coordinates out of range");
  double phi1 = lat_a * kPi / 180.0;
  double phi2 = lat_b * kPi / 180.0;
  double dphi = (lat_b - lat_a) * kPi / 180.0;
  double dlmb = (lon_b - lon_a) * kPi / 180.0;
  double s1 = std::sin(dphi / 2), s2 = std::sin(dlmb / 2);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  h = std::min(1.0, std::max(0.0, h));
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

Topology::Topology(std::vector<Node> nodes, std::vector<Edge> edges) {
  if (nodes.size() < 2) throw TopologyError("topology needs at least 2 nodes");

  std::vector<int> order(nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return id_less(nodes[a].id, nodes[b].id);
  });
  std::vector<int> remap(nodes.size());
  nodes_.reserve(nodes.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    remap[order[pos]] = static_cast<int>(pos);
    nodes_.push_back(std::move(nodes[order[pos]]));
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i)
    if (nodes_[i].id == nodes_[i - 1].id)
      throw TopologyError("duplicate node id '" + nodes_[i].id + "'");

  std::set<std::pair<int, int>> seen;
  for (Edge e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= node_count() || e.v >= node_count())
      throw TopologyError("edge endpoint references an undeclared node");
    e.u = remap[e.u];
    e.v = remap[e.v];
    if (e.u == e.v) throw TopologyError("self loop at node " + nodes_[e.u].id);
    if (e.u > e.v) std::swap(e.u, e.v);
    if (!seen.insert({e.u, e.v}).second)
      throw TopologyError("parallel edge " + nodes_[e.u].id + "-" +
                          nodes_[e.v].id);
    if (!(e.length_km > 0.0) || !std::isfinite(e.length_km))
      throw TopologyError("edge " + nodes_[e.u].id + "-" + nodes_[e.v].id +
                          " has nonpositive or nonfinite length");
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::pair(a.u, a.v) < std::pair(b.u, b.v);
  });

  adjacency_.assign(nodes_.size(), {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    adjacency_[e.u].push_back({e.v, static_cast<int>(i), e.length_km});
    adjacency_[e.v].push_back({e.u, static_cast<int>(i), e.length_km});
  }
  for (auto& nbrs : adjacency_)
    std::sort(nbrs.begin(), nbrs.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });

  // Connectivity over all declared nodes.
  std::vector<char> vis(nodes_.size(), 0);
  std::vector<int> stack = {0};
  vis[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (const Neighbor& nb : adjacency_[u])
      if (!vis[nb.node]) {
        vis[nb.node] = 1;
        ++reached;
        stack.push_back(nb.node);
      }
  }
  if (reached != node_count())
    throw TopologyError("graph is not connected (" + std::to_string(reached) +
                        " of " + std::to_string(node_count()) +
                        " nodes reachable)");

  candidates_.resize(nodes_.size());
  for (int i = 0; i < node_count(); ++i) candidates_[i] = i;
}

int Topology::index_of(const std::string& id) const {
  for (int i = 0; i < node_count(); ++i)
    if (nodes_[i].id == id) return i;
  return -1;
}

int Topology::require_index(const std::string& id) const {
  int i = index_of(id);
  if (i < 0) throw TopologyError("unknown node id '" + id + "'");
  return i;
}

int Topology::edge_between(int a, int b) const {
  for (const Neighbor& nb : adjacency_[a])
    if (nb.node == b) return nb.edge;
  return -1;
}

bool Topology::is_gateway(int node) const {
  return std::binary_search(gateways_.begin(), gateways_.end(), node);
}

void Topology::set_candidate_indices(std::vector<int> idx) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  if (idx.empty()) throw TopologyError("candidate set must be nonempty");
  for (int i : idx)
    if (i < 0 || i >= node_count())
      throw TopologyError("candidate index out of range");
  candidates_ = std::move(idx);
}

void Topology::set_gateway_indices(std::vector<int> idx) {
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  for (int i : idx)
    if (i < 0 || i >= node_count())
      throw TopologyError("gateway index out of range");
  gateways_ = std::move(idx);
}

void Topology::set_candidates(const std::vector<std::string>& ids) {
  std::vector<int> idx;
  idx.reserve(ids.size());
  for (const auto& id : ids) idx.push_back(require_index(id));
  set_candidate_indices(std::move(idx));
}

void Topology::set_gateways(const std::vector<std::string>& ids) {
  std::vector<int> idx;
  idx.reserve(ids.size());
  for (const auto& id : ids) idx.push_back(require_index(id));
  set_gateway_indices(std::move(idx));
}

const FailureCase& builtin_failure_case(int case_id) {
  static const FailureCase cases[4] = {
      {1, 0.05, 0.02, 0.02},
      {2, 0.06, 0.04, 0.03},
      {3, 0.07, 0.06, 0.04},
      {4, 0.08, 0.08, 0.05},
  };
  if (case_id < 1 || case_id > 4)
    throw std::invalid_argument("failure case id must be 1..4");
  return cases[case_id - 1];
}

FailureAssignment sample_failures(const Topology& topo, const FailureCase& fc,
                                  std::uint64_t seed) {
  auto check = [](double upper) {
    if (!(upper >= 0.0) || upper > 1.0)
      throw std::invalid_argument("failure-case interval must lie in [0,1]");
  };
  check(fc.node_upper);
  check(fc.edge_upper);
  check(fc.sat_upper);

  Rng rng(seed);
  FailureAssignment fa;
  fa.node_fail.reserve(topo.node_count());
  for (int i = 0; i < topo.node_count(); ++i)
    fa.node_fail.push_back(rng.next_in(fc.node_upper));
  fa.edge_fail.reserve(topo.edge_count());
  for (int i = 0; i < topo.edge_count(); ++i)
    fa.edge_fail.push_back(rng.next_in(fc.edge_upper));
  fa.sat_fail.reserve(topo.gateways().size());
  for (std::size_t i = 0; i < topo.gateways().size(); ++i)
    fa.sat_fail.push_back(rng.next_in(fc.sat_upper));
  return fa;
}

std::string failure_assignment_csv(const Topology& topo,
                                   const FailureAssignment& fa) {
  std::string out = "kind,id,probability\n";
  for (int i = 0; i < topo.node_count(); ++i)
    out += csv_join({"node", topo.id(i), format_double(fa.node_fail[i])}) + "\n";
  for (int i = 0; i < topo.edge_count(); ++i) {
    const Edge& e = topo.edges()[i];
    out += csv_join({"edge", topo.id(e.u) + "|" + topo.id(e.v),
                     format_double(fa.edge_fail[i])}) +
           "\n";
  }
  for (std::size_t i = 0; i < topo.gateways().size(); ++i)
    out += csv_join({"sat", topo.id(topo.gateways()[i]),
                     format_double(fa.sat_fail[i])}) +
           "\n";
  return out;
}

std::vector<std::string> read_id_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TopologyError("cannot open id list '" + path + "'");
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    // trim
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    ids.push_back(line.substr(b, e - b + 1));
  }
  return ids;
}

}  // namespace ctrlplace
