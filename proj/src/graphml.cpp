// Topology-Zoo-style GraphML input/output. XML handling is delegated to
// Boost.PropertyTree; everything schema-specific lives here.

#include <algorithm>
#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ctrlplace/topology.hpp"

namespace ctrlplace {

namespace {

namespace pt = boost::property_tree;

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

struct RawNode {
  std::string id;
  std::string label;
  double lat = 0.0, lon = 0.0;
  bool has_lat = false, has_lon = false;
};

std::string full_precision(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

// Attribute lookup that treats names literally — ptree's get() would split
// names like "attr.name" at the dot.
std::string attr_of(const pt::ptree& element, const std::string& name) {
  auto attrs = element.get_child_optional("<xmlattr>");
  if (!attrs) return "";
  for (const auto& [key, value] : *attrs)
    if (key == name) return value.get_value<std::string>();
  return "";
}

}  // namespace

Topology load_graphml(const std::string& xml, const GraphmlOptions& opts) {
  pt::ptree tree;
  try {
    std::istringstream in(xml);
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw GraphmlError("GraphML parse error at line " +
                       std::to_string(e.line()) + ": " + e.message());
  }

  auto root = tree.get_child_optional("graphml");
  if (!root) throw GraphmlError("not a GraphML document: missing <graphml>");

  // key id -> canonical attribute name, for node attributes only.
  std::map<std::string, std::string> node_keys;
  for (const auto& [name, child] : *root) {
    if (name != "key") continue;
    std::string domain = attr_of(child, "for");
    std::string attr_name = lower(attr_of(child, "attr.name"));
    std::string key_id = attr_of(child, "id");
    if (domain == "node" && !key_id.empty() &&
        (attr_name == "latitude" || attr_name == "longitude" ||
         attr_name == "label"))
      node_keys[key_id] = attr_name;
  }

  auto graph = root->get_child_optional("graph");
  if (!graph) throw GraphmlError("GraphML document has no <graph> element");

  std::vector<RawNode> raw;
  std::map<std::string, int> id_to_raw;
  struct RawEdge {
    std::string src, dst;
  };
  std::vector<RawEdge> raw_edges;

  for (const auto& [name, child] : *graph) {
    if (name == "node") {
      RawNode n;
      n.id = child.get<std::string>("<xmlattr>.id", "");
      if (n.id.empty()) throw GraphmlError("<node> without id attribute");
      for (const auto& [dname, dchild] : child) {
        if (dname != "data") continue;
        std::string key = dchild.get<std::string>("<xmlattr>.key", "");
        auto it = node_keys.find(key);
        if (it == node_keys.end()) continue;
        std::string value = dchild.get_value<std::string>();
        if (it->second == "label") {
          n.label = value;
          continue;
        }
        try {
          double d = std::stod(value);
          if (it->second == "latitude") {
            n.lat = d;
            n.has_lat = true;
          } else {
            n.lon = d;
            n.has_lon = true;
          }
        } catch (const std::exception&) {
          throw GraphmlError("node '" + n.id + "': bad coordinate value '" +
                             value + "'");
        }
      }
      if (id_to_raw.count(n.id))
        throw GraphmlError("duplicate node id '" + n.id + "'");
      id_to_raw[n.id] = static_cast<int>(raw.size());
      raw.push_back(std::move(n));
    } else if (name == "edge") {
      RawEdge e;
      e.src = child.get<std::string>("<xmlattr>.source", "");
      e.dst = child.get<std::string>("<xmlattr>.target", "");
      if (e.src.empty() || e.dst.empty())
        throw GraphmlError("<edge> without source/target");
      raw_edges.push_back(std::move(e));
    }
  }

  // Resolve coordinates; drop or reject nodes without them.
  std::vector<int> usable(raw.size(), 0);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i].has_lat && raw[i].has_lon) {
      usable[i] = 1;
    } else if (opts.strict_coordinates) {
      throw GraphmlError("node '" + raw[i].id + "' lacks Latitude/Longitude");
    } else {
      if (opts.warnings)
        opts.warnings->push_back("dropped node '" + raw[i].id +
                                 "' without coordinates");
    }
  }

  // Undirected edge set over usable nodes; self loops dropped, parallel
  // edges collapsed (lengths are recomputed from coordinates, so parallels
  // are identical anyway).
  std::map<std::pair<int, int>, int> pair_count;
  for (const RawEdge& e : raw_edges) {
    auto si = id_to_raw.find(e.src);
    auto ti = id_to_raw.find(e.dst);
    if (si == id_to_raw.end() || ti == id_to_raw.end())
      throw GraphmlError("edge references unknown node '" +
                         (si == id_to_raw.end() ? e.src : e.dst) + "'");
    int a = si->second, b = ti->second;
    if (!usable[a] || !usable[b]) {
      if (opts.warnings)
        opts.warnings->push_back("dropped edge " + e.src + "-" + e.dst +
                                 " touching a dropped node");
      continue;
    }
    if (a == b) {
      if (opts.warnings)
        opts.warnings->push_back("dropped self loop at '" + e.src + "'");
      continue;
    }
    if (a > b) std::swap(a, b);
    ++pair_count[{a, b}];
  }
  for (const auto& [pr, cnt] : pair_count)
    if (cnt > 1 && opts.warnings)
      opts.warnings->push_back("collapsed " + std::to_string(cnt) +
                               " parallel edges " + raw[pr.first].id + "-" +
                               raw[pr.second].id);

  // Largest connected component over usable nodes.
  std::vector<std::vector<int>> adj(raw.size());
  for (const auto& [pr, cnt] : pair_count) {
    adj[pr.first].push_back(pr.second);
    adj[pr.second].push_back(pr.first);
  }
  std::vector<int> comp(raw.size(), -1);
  int n_comp = 0;
  for (std::size_t s = 0; s < raw.size(); ++s) {
    if (!usable[s] || comp[s] >= 0) continue;
    std::vector<int> stack = {static_cast<int>(s)};
    comp[s] = n_comp;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int w : adj[u])
        if (comp[w] < 0) {
          comp[w] = n_comp;
          stack.push_back(w);
        }
    }
    ++n_comp;
  }
  std::vector<int> comp_size(n_comp, 0);
  for (std::size_t i = 0; i < raw.size(); ++i)
    if (usable[i]) ++comp_size[comp[i]];
  int best_comp = 0;
  for (int c = 1; c < n_comp; ++c)
    if (comp_size[c] > comp_size[best_comp]) best_comp = c;
  if (n_comp > 1 && opts.warnings)
    opts.warnings->push_back(
        "graph is disconnected; keeping the largest component (" +
        std::to_string(comp_size[best_comp]) + " nodes of " +
        std::to_string(std::count(usable.begin(), usable.end(), 1)) + ")");

  std::vector<Node> nodes;
  std::vector<int> raw_to_final(raw.size(), -1);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!usable[i] || comp[i] != best_comp) continue;
    raw_to_final[i] = static_cast<int>(nodes.size());
    nodes.push_back({raw[i].id, raw[i].label, raw[i].lat, raw[i].lon});
  }
  if (nodes.size() < 2)
    throw GraphmlError("fewer than 2 usable nodes after filtering");

  std::vector<Edge> edges;
  for (const auto& [pr, cnt] : pair_count) {
    int a = raw_to_final[pr.first], b = raw_to_final[pr.second];
    if (a < 0 || b < 0) continue;
    Edge e;
    e.u = a;
    e.v = b;
    e.length_km = haversine_km(nodes[a].lat, nodes[a].lon, nodes[b].lat,
                               nodes[b].lon);
    edges.push_back(e);
  }

  return Topology(std::move(nodes), std::move(edges));
}

Topology load_graphml_file(const std::string& path, const GraphmlOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw GraphmlError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_graphml(buf.str(), opts);
}

std::string write_graphml(const Topology& topo) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out += "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n";
  out += "  <key attr.name=\"label\" attr.type=\"string\" for=\"node\" id=\"d0\"/>\n";
  out += "  <key attr.name=\"Latitude\" attr.type=\"double\" for=\"node\" id=\"d1\"/>\n";
  out += "  <key attr.name=\"Longitude\" attr.type=\"double\" for=\"node\" id=\"d2\"/>\n";
  out += "  <graph edgedefault=\"undirected\">\n";
  for (const Node& n : topo.nodes()) {
    out += "    <node id=\"" + n.id + "\">\n";
    if (!n.label.empty())
      out += "      <data key=\"d0\">" + n.label + "</data>\n";
    out += "      <data key=\"d1\">" + full_precision(n.lat) + "</data>\n";
    out += "      <data key=\"d2\">" + full_precision(n.lon) + "</data>\n";
    out += "    </node>\n";
  }
  for (const Edge& e : topo.edges())
    out += "    <edge source=\"" + topo.id(e.u) + "\" target=\"" +
           topo.id(e.v) + "\"/>\n";
  out += "  </graph>\n";
  out += "</graphml>\n";
  return out;
}

}  // namespace ctrlplace
