#include "asnkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace asnkit {

OnmiVariant onmi_variant_from_string(const std::string& s) {
  std::string up;
  for (char c : s) up.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (up == "MAX") return OnmiVariant::MAX;
  if (up == "LFK") return OnmiVariant::LFK;
  if (up == "SUM") return OnmiVariant::SUM;
  throw ValueError("unknown onmi variant '" + s + "' (expected MAX, LFK or SUM)");
}

std::string to_string(OnmiVariant v) {
  switch (v) {
    case OnmiVariant::MAX: return "MAX";
    case OnmiVariant::LFK: return "LFK";
    case OnmiVariant::SUM: return "SUM";
  }
  return "MAX";
}

namespace {

std::vector<char> member_mask(const Graph& g, const std::vector<int>& community) {
  std::vector<char> in(static_cast<std::size_t>(g.node_count()), 0);
  for (int v : community) {
    if (v < 0 || v >= g.node_count())
      throw ValueError("community node " + std::to_string(v) + " outside graph");
    in[static_cast<std::size_t>(v)] = 1;
  }
  return in;
}

double plogp(double p) { return p > 0.0 ? p * std::log2(p) : 0.0; }

}  // namespace

CommunityCut community_cut(const Graph& g, const std::vector<int>& community) {
  auto in = member_mask(g, community);
  CommunityCut cut;
  for (int v : community) {
    for (auto [u, w] : g.neighbors(v)) {
      (void)w;
      if (in[static_cast<std::size_t>(u)]) {
        if (u > v) ++cut.internal;  // count internal edges once
      } else {
        ++cut.boundary;
      }
    }
  }
  return cut;
}

double modularity(const Graph& g, const Cover& partition) {
  if (!partition.is_partition())
    throw ContractError("modularity requires a disjoint exhaustive partition; "
                        "use lazar_modularity for overlapping covers");
  if (partition.node_count() != g.node_count())
    throw ContractError("partition node count differs from graph");
  double W = g.total_weight();
  if (!(W > 0.0)) throw ContractError("modularity undefined on an edgeless graph");
  std::vector<int> label(static_cast<std::size_t>(g.node_count()), -1);
  const auto& comms = partition.communities();
  for (std::size_t c = 0; c < comms.size(); ++c)
    for (int v : comms[c]) label[static_cast<std::size_t>(v)] = static_cast<int>(c);
  std::vector<double> internal(comms.size(), 0.0), vol(comms.size(), 0.0);
  for (const auto& e : g.edges()) {
    int cu = label[static_cast<std::size_t>(e.u)];
    int cv = label[static_cast<std::size_t>(e.v)];
    if (cu == cv) internal[static_cast<std::size_t>(cu)] += e.w;
  }
  for (int v = 0; v < g.node_count(); ++v)
    vol[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])] += g.strength(v);
  double q = 0.0;
  for (std::size_t c = 0; c < comms.size(); ++c) {
    double frac = vol[c] / (2.0 * W);
    q += internal[c] / W - frac * frac;
  }
  return q;
}

double lazar_modularity(const Graph& g, const Cover& cover) {
  if (cover.node_count() != g.node_count())
    throw ContractError("cover node count differs from graph");
  auto s = cover.membership_counts();
  double total = 0.0;
  for (const auto& comm : cover.communities()) {
    std::size_t nc = comm.size();
    if (nc <= 1) continue;  // density factor defined 0 for singletons
    auto in = member_mask(g, comm);
    double node_sum = 0.0;
    long long internal_edges = 0;
    for (int v : comm) {
      int deg = g.degree(v);
      if (deg == 0) continue;  // degree-0 nodes contribute 0
      int k_in = 0;
      for (auto [u, w] : g.neighbors(v)) {
        (void)w;
        if (in[static_cast<std::size_t>(u)]) {
          ++k_in;
          if (u > v) ++internal_edges;
        }
      }
      int k_out = deg - k_in;
      node_sum += static_cast<double>(k_in - k_out) /
                  (static_cast<double>(deg) * s[static_cast<std::size_t>(v)]);
    }
    double pairs = static_cast<double>(nc) * (static_cast<double>(nc) - 1.0) / 2.0;
    double density = static_cast<double>(internal_edges) / pairs;
    total += (node_sum / static_cast<double>(nc)) * density;
  }
  return total / static_cast<double>(cover.community_count());
}

double conductance(const Graph& g, const std::vector<int>& community) {
  if (community.empty()) throw ContractError("conductance of an empty community");
  auto cut = community_cut(g, community);
  double denom = 2.0 * static_cast<double>(cut.internal) + static_cast<double>(cut.boundary);
  if (denom == 0.0) return 0.0;  // no incident edges
  return static_cast<double>(cut.boundary) / denom;
}

double ncut(const Graph& g, const std::vector<int>& community) {
  if (community.empty()) throw ContractError("ncut of an empty community");
  auto cut = community_cut(g, community);
  long long m = g.edge_count();
  double first = 0.0, second = 0.0;
  double d1 = 2.0 * static_cast<double>(cut.internal) + static_cast<double>(cut.boundary);
  if (d1 > 0.0) first = static_cast<double>(cut.boundary) / d1;
  double d2 = 2.0 * static_cast<double>(m - cut.internal) + static_cast<double>(cut.boundary);
  if (d2 > 0.0) second = static_cast<double>(cut.boundary) / d2;
  return first + second;
}

double community_density(const Graph& g, const std::vector<int>& community) {
  if (community.empty()) throw ContractError("density of an empty community");
  std::size_t size = community.size();
  if (size == 1) return 1.0;
  auto cut = community_cut(g, community);
  double pairs = static_cast<double>(size) * (static_cast<double>(size) - 1.0) / 2.0;
  return static_cast<double>(cut.internal) / pairs;
}

double map_codelength(const Graph& g, const Cover& partition) {
  if (g.edge_count() == 0) throw ValueError("map_codelength undefined on an edgeless graph");
  if (!partition.is_partition())
    throw ContractError("map_codelength requires a disjoint exhaustive partition");
  if (partition.node_count() != g.node_count())
    throw ContractError("partition node count differs from graph");
  double two_w = 2.0 * g.total_weight();
  const auto& comms = partition.communities();
  std::vector<int> label(static_cast<std::size_t>(g.node_count()), -1);
  for (std::size_t c = 0; c < comms.size(); ++c)
    for (int v : comms[c]) label[static_cast<std::size_t>(v)] = static_cast<int>(c);

  std::vector<double> exitw(comms.size(), 0.0), sum_p(comms.size(), 0.0);
  for (const auto& e : g.edges()) {
    int cu = label[static_cast<std::size_t>(e.u)];
    int cv = label[static_cast<std::size_t>(e.v)];
    if (cu != cv) {
      exitw[static_cast<std::size_t>(cu)] += e.w;
      exitw[static_cast<std::size_t>(cv)] += e.w;
    }
  }
  double sum_plogp_nodes = 0.0;
  for (int v = 0; v < g.node_count(); ++v) {
    double p = g.strength(v) / two_w;
    sum_plogp_nodes += plogp(p);
    sum_p[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])] += p;
  }
  double q_total = 0.0, sum_plogp_q = 0.0, sum_plogp_stay = 0.0;
  for (std::size_t c = 0; c < comms.size(); ++c) {
    double q = exitw[c] / two_w;
    q_total += q;
    sum_plogp_q += plogp(q);
    sum_plogp_stay += plogp(q + sum_p[c]);
  }
  return plogp(q_total) - 2.0 * sum_plogp_q + sum_plogp_stay - sum_plogp_nodes;
}

double transitivity(const Graph& g) {
  long long triangles3 = 0;  // each triangle counted 3 times
  long long triples = 0;
  for (int v = 0; v < g.node_count(); ++v) {
    long long d = g.degree(v);
    triples += d * (d - 1) / 2;
    const auto& nbrs = g.neighbors(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j)
        if (g.has_edge(nbrs[i].first, nbrs[j].first)) ++triangles3;
  }
  if (triples == 0) return 0.0;
  return static_cast<double>(triangles3) / static_cast<double>(triples);
}

double avg_path_length(const Graph& g, const std::vector<int>* subset) {
  std::vector<int> nodes;
  if (subset) {
    nodes = *subset;
    for (int v : nodes)
      if (v < 0 || v >= g.node_count())
        throw ValueError("avg_path_length: node " + std::to_string(v) + " outside graph");
  } else {
    nodes.resize(static_cast<std::size_t>(g.node_count()));
    std::iota(nodes.begin(), nodes.end(), 0);
  }
  if (nodes.size() < 2) throw ValueError("avg_path_length needs at least two nodes");

  std::vector<char> wanted(static_cast<std::size_t>(g.node_count()), 0);
  for (int v : nodes) wanted[static_cast<std::size_t>(v)] = 1;

  double total = 0.0;
  long long pairs = 0;
  std::vector<int> dist(static_cast<std::size_t>(g.node_count()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int src = nodes[i];
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(src)] = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (auto [u, w] : g.neighbors(v)) {
        (void)w;
        if (dist[static_cast<std::size_t>(u)] < 0) {
          dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
          queue.push_back(u);
        }
      }
    }
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      int d = dist[static_cast<std::size_t>(nodes[j])];
      if (d < 0)
        throw ValueError("avg_path_length: nodes " + std::to_string(src) + " and " +
                         std::to_string(nodes[j]) + " are disconnected");
      total += d;
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace asnkit
