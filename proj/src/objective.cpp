#include "ctrlplace/objective.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ctrlplace/csv.hpp"

namespace ctrlplace {

namespace {

// Round-trippable double formatting for the replay bundle; the 12-digit
// matrix export is for analysis, this one must be bit-exact.
std::string exact_double(double x) { return format_double(x, 17); }

}  // namespace

void Instance::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
  if (cand_ids.empty()) throw std::invalid_argument("no candidates");
  if (cand_ids.size() > 64)
    throw std::invalid_argument("at most 64 candidates are supported");
  if (d.size() != cand_ids.size())
    throw std::invalid_argument("d_k size mismatch");
  if (e.size() != cand_ids.size() * node_ids.size())
    throw std::invalid_argument("error-matrix shape mismatch");
  for (double x : e)
    if (!(x >= 0.0 && x <= 1.0))
      throw std::invalid_argument("error rate outside [0,1]");
  for (double x : d)
    if (!(x >= 0.0) || !std::isfinite(x))
      throw std::invalid_argument("d_k must be finite and nonnegative");
}

double upper_bound(double alpha, const std::vector<double>& d, int n_nodes) {
  double sum_d = 0.0;
  for (double x : d) sum_d += x;
  return alpha * sum_d + static_cast<double>(n_nodes);
}

Instance build_instance(const Topology& topo, const ErrorMatrix& em,
                        double alpha) {
  if (em.candidate_count() != static_cast<int>(topo.candidates().size()) ||
      em.node_count() != topo.node_count())
    throw std::invalid_argument("error matrix does not match topology");
  Instance inst;
  inst.alpha = alpha;
  inst.node_ids.reserve(topo.node_count());
  for (int v = 0; v < topo.node_count(); ++v)
    inst.node_ids.push_back(topo.id(v));
  inst.cand_ids.reserve(topo.candidates().size());
  for (int k : topo.candidates()) inst.cand_ids.push_back(topo.id(k));
  inst.e.resize(inst.cand_ids.size() * inst.node_ids.size());
  for (int c = 0; c < em.candidate_count(); ++c)
    for (int v = 0; v < em.node_count(); ++v)
      inst.e[static_cast<std::size_t>(c) * inst.node_ids.size() + v] =
          em.at(c, v);
  inst.d.reserve(topo.candidates().size());
  for (int k : topo.candidates()) inst.d.push_back(gateway_distance(topo, k));
  inst.w_bar = upper_bound(alpha, inst.d, topo.node_count());
  inst.validate();
  return inst;
}

double eval_wc(const Instance& inst, uint64_t placed) {
  double sum = 0.0;
  for (int c = 0; c < inst.candidate_count(); ++c)
    if (placed & (1ULL << c)) sum += inst.d[c];
  return sum;
}

double eval_wr(const Instance& inst, uint64_t placed) {
  const int n = inst.node_count();
  double sum = 0.0;
  for (int v = 0; v < n; ++v) {
    double best = 1.0;  // an unserved node is charged the maximal error
    for (int c = 0; c < inst.candidate_count(); ++c)
      if (placed & (1ULL << c)) best = std::min(best, inst.error(c, v));
    sum += best;
  }
  return sum;
}

double eval_w(const Instance& inst, uint64_t placed) {
  return inst.alpha * eval_wc(inst, placed) + eval_wr(inst, placed);
}

double w_tilde(const Instance& inst, uint64_t placed) {
  return inst.w_bar - eval_w(inst, placed);
}

std::vector<int> optimal_assignment(const Instance& inst, uint64_t placed) {
  if (placed == 0)
    throw std::invalid_argument("optimal_assignment: empty placement");
  const int n = inst.node_count();
  std::vector<int> assign(n, -1);
  for (int v = 0; v < n; ++v) {
    double best = 0.0;
    for (int c = 0; c < inst.candidate_count(); ++c) {
      if (!(placed & (1ULL << c))) continue;
      double e = inst.error(c, v);
      if (assign[v] < 0 || e < best) {
        assign[v] = c;
        best = e;
      }
    }
  }
  return assign;
}

void Placement::validate(const Instance& inst) const {
  if (placed.empty())
    throw std::invalid_argument("placement must be nonempty");
  for (int c : placed)
    if (c < 0 || c >= inst.candidate_count())
      throw std::invalid_argument("placed candidate out of range");
  if (!std::is_sorted(placed.begin(), placed.end()))
    throw std::invalid_argument("placed set must be sorted");
  if (std::adjacent_find(placed.begin(), placed.end()) != placed.end())
    throw std::invalid_argument("placed set has duplicates");
  if (static_cast<int>(assignment.size()) != inst.node_count())
    throw std::invalid_argument("every node needs exactly one assignment");
  for (int c : assignment)
    if (!std::binary_search(placed.begin(), placed.end(), c))
      throw std::invalid_argument("node assigned to an unplaced candidate");
}

Placement make_placement(const Instance& inst, uint64_t placed) {
  Placement p;
  for (int c = 0; c < inst.candidate_count(); ++c)
    if (placed & (1ULL << c)) p.placed.push_back(c);
  p.assignment = optimal_assignment(inst, placed);
  return p;
}

uint64_t placed_mask(const Placement& p) {
  uint64_t mask = 0;
  for (int c : p.placed) mask |= 1ULL << c;
  return mask;
}

std::string instance_to_csv(const Instance& inst) {
  std::string out = "table,k,v,value\n";
  out += csv_join({"config", "alpha", "", exact_double(inst.alpha)}) + "\n";
  out += csv_join({"config", "w_bar", "", exact_double(inst.w_bar)}) + "\n";
  for (int c = 0; c < inst.candidate_count(); ++c)
    out += csv_join({"d", inst.cand_ids[c], "", exact_double(inst.d[c])}) + "\n";
  for (int c = 0; c < inst.candidate_count(); ++c)
    for (int v = 0; v < inst.node_count(); ++v)
      out += csv_join({"e", inst.cand_ids[c], inst.node_ids[v],
                       exact_double(inst.error(c, v))}) +
             "\n";
  return out;
}

Instance instance_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || csv_split(line) !=
      std::vector<std::string>{"table", "k", "v", "value"})
    throw std::invalid_argument("instance bundle: bad header");

  Instance inst;
  bool have_alpha = false, have_wbar = false;
  struct ERow {
    std::string k, v;
    double val;
  };
  std::vector<ERow> erows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = csv_split(line);
    if (f.size() != 4) throw std::invalid_argument("instance bundle: bad row");
    double val = std::stod(f[3]);
    if (f[0] == "config") {
      if (f[1] == "alpha") {
        inst.alpha = val;
        have_alpha = true;
      } else if (f[1] == "w_bar") {
        inst.w_bar = val;
        have_wbar = true;
      } else {
        throw std::invalid_argument("instance bundle: unknown config key '" +
                                    f[1] + "'");
      }
    } else if (f[0] == "d") {
      inst.cand_ids.push_back(f[1]);
      inst.d.push_back(val);
    } else if (f[0] == "e") {
      erows.push_back({f[1], f[2], val});
    } else {
      throw std::invalid_argument("instance bundle: unknown table '" + f[0] +
                                  "'");
    }
  }
  if (!have_alpha || !have_wbar)
    throw std::invalid_argument("instance bundle: missing config");

  // Node order is defined by the first candidate's e rows.
  if (erows.empty() || inst.cand_ids.empty())
    throw std::invalid_argument("instance bundle: missing d or e rows");
  for (const ERow& r : erows) {
    if (r.k != inst.cand_ids[0]) break;
    inst.node_ids.push_back(r.v);
  }
  std::size_t nn = inst.node_ids.size(), nk = inst.cand_ids.size();
  if (erows.size() != nn * nk)
    throw std::invalid_argument("instance bundle: e rows do not cover KxV");
  inst.e.resize(nn * nk);
  for (std::size_t c = 0; c < nk; ++c)
    for (std::size_t v = 0; v < nn; ++v) {
      const ERow& r = erows[c * nn + v];
      if (r.k != inst.cand_ids[c] || r.v != inst.node_ids[v])
        throw std::invalid_argument("instance bundle: e rows out of order");
      inst.e[c * nn + v] = r.val;
    }
  inst.validate();
  return inst;
}

}  // namespace ctrlplace
