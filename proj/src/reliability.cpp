#include "ctrlplace/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>

#include "ctrlplace/csv.hpp"

namespace ctrlplace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Weight of traversing from `from` into `into` over edge `edge`, on the way
// to `dst`. Latency search charges edge lengths only; reliability search
// additionally charges -ln(1 - P_v) when entering an intermediate node.
using ArcWeight = std::function<double(int from, int into, int edge)>;

struct Filter {
  const std::vector<char>* banned_nodes = nullptr;  // by node index
  const std::vector<char>* banned_edges = nullptr;  // by edge index

  bool node_ok(int n) const { return !banned_nodes || !(*banned_nodes)[n]; }
  bool edge_ok(int e) const { return !banned_edges || !(*banned_edges)[e]; }
};

// Distance from every node to dst under `arc`, honoring the filter.
// Unrelaxed nodes keep +inf, which is also the correct value when every
// usable path carries an infinite-weight component.
std::vector<double> dijkstra_to(const Topology& topo, int dst,
                                const ArcWeight& arc, const Filter& filter) {
  std::vector<double> dist(topo.node_count(), kInf);
  if (!filter.node_ok(dst)) return dist;
  dist[dst] = 0.0;
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> pq;
  pq.push({0.0, dst});
  std::vector<char> settled(topo.node_count(), 0);
  while (!pq.empty()) {
    auto [d, x] = pq.top();
    pq.pop();
    if (settled[x]) continue;
    settled[x] = 1;
    for (const Topology::Neighbor& nb : topo.neighbors(x)) {
      int y = nb.node;
      if (settled[y] || !filter.node_ok(y) || !filter.edge_ok(nb.edge))
        continue;
      double cand = arc(y, x, nb.edge) + d;
      if (cand < dist[y]) {
        dist[y] = cand;
        pq.push({cand, y});
      }
    }
  }
  return dist;
}

// Lexicographically smallest simple src->dst path among those consistent
// with dist (every step satisfies arc(u,w) + dist[w] == dist[u]). Depth-first
// with backtracking; the Dijkstra parent chain is always consistent, so a
// result exists whenever dist[src] was produced by a relaxation. For
// infinite-distance regions every infinite step is consistent and the search
// degenerates to lex-min path search, which is the wanted behavior for
// certain-failure components.
std::optional<std::vector<int>> lex_min_path(const Topology& topo, int src,
                                             int dst,
                                             const std::vector<double>& dist,
                                             const ArcWeight& arc,
                                             const Filter& filter) {
  if (!filter.node_ok(src) || !filter.node_ok(dst)) return std::nullopt;
  std::vector<char> on_path(topo.node_count(), 0);
  std::vector<int> path = {src};
  std::vector<std::size_t> next_idx = {0};
  on_path[src] = 1;
  if (src == dst) return path;

  while (!path.empty()) {
    int u = path.back();
    if (u == dst) return path;
    const auto& nbrs = topo.neighbors(u);
    std::size_t i = next_idx.back();
    bool advanced = false;
    while (i < nbrs.size()) {
      const Topology::Neighbor& nb = nbrs[i];
      ++i;
      int w = nb.node;
      if (on_path[w] || !filter.node_ok(w) || !filter.edge_ok(nb.edge))
        continue;
      // Infinite distances compare equal here, which makes every step
      // inside a certain-failure region admissible; that is intended.
      if (arc(u, w, nb.edge) + dist[w] != dist[u]) continue;
      next_idx.back() = i;
      path.push_back(w);
      next_idx.push_back(0);
      on_path[w] = 1;
      advanced = true;
      break;
    }
    if (!advanced) {
      on_path[path.back()] = 0;
      path.pop_back();
      next_idx.pop_back();
    }
  }
  return std::nullopt;
}

double path_latency(const Topology& topo, const std::vector<int>& nodes) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    int e = topo.edge_between(nodes[i], nodes[i + 1]);
    if (e < 0)
      throw TopologyError("path step " + topo.id(nodes[i]) + "->" +
                          topo.id(nodes[i + 1]) + " is not an edge");
    total += topo.edges()[e].length_km;
  }
  return total;
}

ArcWeight latency_arc(const Topology& topo) {
  return [&topo](int, int, int edge) { return topo.edges()[edge].length_km; };
}

// -ln(1 - p); +inf at p == 1.
double survival_weight(double p) { return -std::log1p(-p); }

ArcWeight reliability_arc(const Topology& topo, const FailureAssignment& fa,
                          int dst) {
  return [&topo, &fa, dst](int, int into, int edge) {
    double w = survival_weight(fa.edge_fail[edge]);
    if (into != dst) w += survival_weight(fa.node_fail[into]);
    return w;
  };
}

int gateway_position(const Topology& topo, int node) {
  const auto& gws = topo.gateways();
  auto it = std::lower_bound(gws.begin(), gws.end(), node);
  if (it == gws.end() || *it != node) return -1;
  return static_cast<int>(it - gws.begin());
}

}  // namespace

PathRecord shortest_latency_path(const Topology& topo, int src, int dst) {
  if (src < 0 || src >= topo.node_count() || dst < 0 ||
      dst >= topo.node_count())
    throw TopologyError("shortest_latency_path: node index out of range");
  Filter none;
  ArcWeight arc = latency_arc(topo);
  std::vector<double> dist = dijkstra_to(topo, dst, arc, none);
  if (std::isinf(dist[src]))
    throw TopologyError("no path from " + topo.id(src) + " to " +
                        topo.id(dst));
  auto nodes = lex_min_path(topo, src, dst, dist, arc, none);
  PathRecord rec;
  rec.nodes = std::move(*nodes);
  rec.latency_km = path_latency(topo, rec.nodes);
  return rec;
}

std::vector<PathRecord> yen_k_paths(const Topology& topo, int src, int dst,
                                    int k) {
  if (k < 1) throw std::invalid_argument("yen_k_paths: k must be >= 1");

  std::vector<PathRecord> result;
  result.push_back(shortest_latency_path(topo, src, dst));

  using Candidate = std::pair<double, std::vector<int>>;  // (latency, nodes)
  std::set<Candidate> candidates;
  std::set<std::vector<int>> seen;
  seen.insert(result[0].nodes);

  ArcWeight arc = latency_arc(topo);

  while (static_cast<int>(result.size()) < k) {
    const std::vector<int>& prev = result.back().nodes;
    for (std::size_t j = 0; j + 1 < prev.size(); ++j) {
      int spur = prev[j];
      std::vector<char> banned_nodes(topo.node_count(), 0);
      for (std::size_t t = 0; t < j; ++t) banned_nodes[prev[t]] = 1;
      std::vector<char> banned_edges(topo.edge_count(), 0);
      for (const PathRecord& p : result) {
        if (p.nodes.size() <= j + 1) continue;
        if (!std::equal(prev.begin(), prev.begin() + j + 1, p.nodes.begin()))
          continue;
        int e = topo.edge_between(p.nodes[j], p.nodes[j + 1]);
        if (e >= 0) banned_edges[e] = 1;
      }
      Filter filter{&banned_nodes, &banned_edges};
      std::vector<double> dist = dijkstra_to(topo, dst, arc, filter);
      if (std::isinf(dist[spur])) continue;
      auto spur_path = lex_min_path(topo, spur, dst, dist, arc, filter);
      if (!spur_path) continue;
      std::vector<int> total(prev.begin(), prev.begin() + j);
      total.insert(total.end(), spur_path->begin(), spur_path->end());
      if (seen.count(total)) continue;
      double latency = path_latency(topo, total);
      candidates.insert({latency, total});
    }
    if (candidates.empty()) break;
    auto best = candidates.begin();
    PathRecord rec;
    rec.nodes = best->second;
    rec.latency_km = best->first;
    seen.insert(rec.nodes);
    candidates.erase(best);
    result.push_back(std::move(rec));
  }
  return result;
}

double path_error_rate(const Topology& topo, const std::vector<int>& path,
                       const FailureAssignment& fa,
                       const ReliabilityOptions& opts) {
  if (path.empty()) throw std::invalid_argument("path_error_rate: empty path");
  double survival = 1.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    int e = topo.edge_between(path[i], path[i + 1]);
    if (e < 0)
      throw TopologyError("path step " + topo.id(path[i]) + "->" +
                          topo.id(path[i + 1]) + " is not an edge");
    survival *= 1.0 - fa.edge_fail[e];
  }
  if (opts.include_endpoints) {
    // Endpoints coincide for a single-node path; count the node once.
    for (std::size_t i = 0; i < path.size(); ++i)
      survival *= 1.0 - fa.node_fail[path[i]];
  } else {
    for (std::size_t i = 1; i + 1 < path.size(); ++i)
      survival *= 1.0 - fa.node_fail[path[i]];
  }
  if (opts.satellite_hop) {
    int pos = gateway_position(topo, path.back());
    if (pos >= 0) survival *= 1.0 - fa.sat_fail[pos];
  }
  return 1.0 - survival;
}

PathRecord best_control_path(const Topology& topo, const FailureAssignment& fa,
                             int k, int v, const ReliabilityOptions& opts) {
  PathRecord rec;
  if (k == v) {
    rec.nodes = {k};
    rec.latency_km = 0.0;
    rec.error_rate = path_error_rate(topo, rec.nodes, fa, opts);
    return rec;
  }
  if (opts.mode == PathMode::kYenK) {
    std::vector<PathRecord> cands = yen_k_paths(topo, k, v, opts.yen_k);
    int best = 0;
    double best_err = kInf;
    for (std::size_t i = 0; i < cands.size(); ++i) {
      double err = path_error_rate(topo, cands[i].nodes, fa, opts);
      if (err < best_err) {
        best_err = err;
        best = static_cast<int>(i);
      }
    }
    rec = cands[best];
    rec.error_rate = best_err;
    return rec;
  }
  // Exact-reliable: additive -ln(1 - P) weights over edges and intermediate
  // nodes. Endpoint and satellite factors are identical for every k-v path,
  // so they never change the argmin and are applied to the result only.
  Filter none;
  ArcWeight arc = reliability_arc(topo, fa, v);
  std::vector<double> dist = dijkstra_to(topo, v, arc, none);
  auto nodes = lex_min_path(topo, k, v, dist, arc, none);
  if (!nodes)
    throw TopologyError("no path from " + topo.id(k) + " to " + topo.id(v));
  rec.nodes = std::move(*nodes);
  rec.latency_km = path_latency(topo, rec.nodes);
  rec.error_rate = path_error_rate(topo, rec.nodes, fa, opts);
  return rec;
}

ErrorMatrix::ErrorMatrix(int n_candidates, int n_nodes, std::string mode_tag)
    : n_candidates_(n_candidates),
      n_nodes_(n_nodes),
      mode_tag_(std::move(mode_tag)),
      e_(static_cast<std::size_t>(n_candidates) * n_nodes, 0.0),
      paths_(static_cast<std::size_t>(n_candidates) * n_nodes) {}

void ErrorMatrix::set(int cand, int node, PathRecord rec) {
  std::size_t idx = static_cast<std::size_t>(cand) * n_nodes_ + node;
  e_[idx] = rec.error_rate;
  paths_[idx] = std::move(rec);
}

ErrorMatrix reliability_matrix(const Topology& topo,
                               const FailureAssignment& fa,
                               const ReliabilityOptions& opts) {
  std::string tag = opts.mode == PathMode::kExactReliable
                        ? "exact-reliable"
                        : "yen-" + std::to_string(opts.yen_k);
  ErrorMatrix em(static_cast<int>(topo.candidates().size()),
                 topo.node_count(), tag);
  for (std::size_t c = 0; c < topo.candidates().size(); ++c) {
    int k = topo.candidates()[c];
    for (int v = 0; v < topo.node_count(); ++v)
      em.set(static_cast<int>(c), v, best_control_path(topo, fa, k, v, opts));
  }
  return em;
}

double gateway_distance(const Topology& topo, int k) {
  if (topo.gateways().empty())
    throw TopologyError("gateway_distance: gateway set is empty");
  Filter none;
  std::vector<double> dist = dijkstra_to(topo, k, latency_arc(topo), none);
  double best = kInf;
  for (int g : topo.gateways()) best = std::min(best, dist[g]);
  return best;
}

std::vector<double> latency_distances_from(const Topology& topo, int src) {
  Filter none;
  return dijkstra_to(topo, src, latency_arc(topo), none);
}

std::string error_matrix_csv(const Topology& topo, const ErrorMatrix& em) {
  std::string out = "k,v,error_rate,path\n";
  for (int c = 0; c < em.candidate_count(); ++c) {
    for (int v = 0; v < em.node_count(); ++v) {
      const PathRecord& p = em.path(c, v);
      std::string joined;
      for (std::size_t i = 0; i < p.nodes.size(); ++i) {
        if (i) joined += ';';
        joined += topo.id(p.nodes[i]);
      }
      out += csv_join({topo.id(topo.candidates()[c]), topo.id(v),
                       format_double(em.at(c, v)), joined}) +
             "\n";
    }
  }
  return out;
}

}  // namespace ctrlplace
