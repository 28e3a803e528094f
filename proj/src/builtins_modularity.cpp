#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "asnkit/metrics.hpp"
#include "asnkit/rng.hpp"
#include "builtins.hpp"
#include "local_graph.hpp"

namespace asnkit::detail {

namespace {

// One louvain level: greedy node moves maximizing modularity gain.
// Returns true when at least one move happened.
bool louvain_level(const LocalGraph& lg, std::vector<int>& label, Rng& rng) {
  int n = lg.n;
  double W = lg.strength_total / 2.0;
  std::vector<double> comm_strength(static_cast<std::size_t>(n), 0.0);
  for (int v = 0; v < n; ++v)
    comm_strength[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])] +=
        lg.strength[static_cast<std::size_t>(v)];

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  bool improved_ever = false;
  for (int pass = 0; pass < 100; ++pass) {
    rng.shuffle(order);
    int moves = 0;
    for (int v : order) {
      int home = label[static_cast<std::size_t>(v)];
      double sv = lg.strength[static_cast<std::size_t>(v)];
      std::map<int, double> link_to;  // community -> weight from v
      link_to[home] += 0.0;
      for (auto [u, w] : lg.adj[static_cast<std::size_t>(v)])
        link_to[label[static_cast<std::size_t>(u)]] += w;
      comm_strength[static_cast<std::size_t>(home)] -= sv;
      double base_links = link_to[home];
      double best_gain = 0.0;
      int best_comm = home;
      for (const auto& [c, links] : link_to) {
        if (c == home) continue;
        double gain = (links - base_links) / W -
                      sv * (comm_strength[static_cast<std::size_t>(c)] -
                            comm_strength[static_cast<std::size_t>(home)]) /
                          (2.0 * W * W);
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best_comm = c;
        }
      }
      label[static_cast<std::size_t>(v)] = best_comm;
      comm_strength[static_cast<std::size_t>(best_comm)] += sv;
      if (best_comm != home) ++moves;
    }
    if (moves == 0) break;
    improved_ever = true;
  }
  return improved_ever;
}

}  // namespace

// Greedy modularity with node-move and aggregation phases.
Cover louvain(const Graph& g, std::uint64_t seed) {
  int n = g.node_count();
  Rng rng(seed);
  LocalGraph lg = LocalGraph::from(g);
  std::vector<int> node_to_group(static_cast<std::size_t>(n));
  std::iota(node_to_group.begin(), node_to_group.end(), 0);

  if (lg.strength_total <= 0.0) return Cover::singletons(n);

  for (int level = 0; level < 50; ++level) {
    std::vector<int> label(static_cast<std::size_t>(lg.n));
    std::iota(label.begin(), label.end(), 0);
    bool moved = louvain_level(lg, label, rng);
    int groups = compact_labels(label);
    for (auto& l : node_to_group)
      l = label[static_cast<std::size_t>(l)];
    if (!moved || groups == lg.n) break;
    lg = lg.quotient(label, groups);
  }
  int groups = compact_labels(node_to_group);
  return labels_to_cover(n, node_to_group, groups);
}

// Greedy agglomerative modularity merging: repeatedly join the adjacent pair
// with the largest gain, tracking the best partition of the whole sequence.
Cover cnm(const Graph& g) {
  int n = g.node_count();
  double W = g.total_weight();
  if (W <= 0.0) return Cover::singletons(n);

  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };

  std::map<std::pair<int, int>, double> between;  // weight between live comms
  std::vector<double> vol(static_cast<std::size_t>(n), 0.0);
  for (const auto& e : g.edges())
    between[{std::min(e.u, e.v), std::max(e.u, e.v)}] += e.w;
  for (int v = 0; v < n; ++v) vol[static_cast<std::size_t>(v)] = g.strength(v);

  double q = 0.0;
  for (int v = 0; v < n; ++v) {
    double frac = vol[static_cast<std::size_t>(v)] / (2.0 * W);
    q -= frac * frac;
  }
  double best_q = q;
  std::vector<std::pair<int, int>> merges;
  long long best_step = 0;

  while (!between.empty()) {
    double best_gain = -std::numeric_limits<double>::infinity();
    std::pair<int, int> best_pair{-1, -1};
    for (const auto& [pair, w] : between) {
      double gain = w / W - 2.0 * vol[static_cast<std::size_t>(pair.first)] *
                                vol[static_cast<std::size_t>(pair.second)] / (4.0 * W * W);
      if (gain > best_gain) {
        best_gain = gain;
        best_pair = pair;
      }
    }
    auto [a, b] = best_pair;
    merges.push_back(best_pair);
    q += best_gain;
    parent[static_cast<std::size_t>(b)] = a;
    vol[static_cast<std::size_t>(a)] += vol[static_cast<std::size_t>(b)];
    // fold b's links into a
    std::map<std::pair<int, int>, double> updated;
    for (auto it = between.begin(); it != between.end();) {
      auto [x, y] = it->first;
      if (x == b || y == b) {
        int other = x == b ? y : x;
        if (other != a)
          updated[{std::min(a, other), std::max(a, other)}] += it->second;
        it = between.erase(it);
      } else {
        ++it;
      }
    }
    for (const auto& [pair, w] : updated) between[pair] += w;
    if (q > best_q + 1e-12) {
      best_q = q;
      best_step = static_cast<long long>(merges.size());
    }
  }

  // replay merges up to the best step
  std::iota(parent.begin(), parent.end(), 0);
  for (long long i = 0; i < best_step; ++i)
    parent[static_cast<std::size_t>(merges[static_cast<std::size_t>(i)].second)] =
        merges[static_cast<std::size_t>(i)].first;
  std::vector<int> label(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) label[static_cast<std::size_t>(v)] = find(v);
  int groups = compact_labels(label);
  return labels_to_cover(n, label, groups);
}

namespace {

// Brandes edge betweenness on an unweighted adjacency-list view.
std::map<std::pair<int, int>, double> edge_betweenness(
    int n, const std::vector<std::set<int>>& adj) {
  std::map<std::pair<int, int>, double> eb;
  std::vector<int> dist(static_cast<std::size_t>(n));
  std::vector<double> sigma(static_cast<std::size_t>(n)), delta(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> preds(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    for (auto& p : preds) p.clear();
    dist[static_cast<std::size_t>(s)] = 0;
    sigma[static_cast<std::size_t>(s)] = 1.0;
    std::deque<int> queue{s};
    std::vector<int> visit_order;
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      visit_order.push_back(v);
      for (int u : adj[static_cast<std::size_t>(v)]) {
        if (dist[static_cast<std::size_t>(u)] < 0) {
          dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
          queue.push_back(u);
        }
        if (dist[static_cast<std::size_t>(u)] == dist[static_cast<std::size_t>(v)] + 1) {
          sigma[static_cast<std::size_t>(u)] += sigma[static_cast<std::size_t>(v)];
          preds[static_cast<std::size_t>(u)].push_back(v);
        }
      }
    }
    for (auto it = visit_order.rbegin(); it != visit_order.rend(); ++it) {
      int w = *it;
      for (int v : preds[static_cast<std::size_t>(w)]) {
        double share = sigma[static_cast<std::size_t>(v)] / sigma[static_cast<std::size_t>(w)] *
                       (1.0 + delta[static_cast<std::size_t>(w)]);
        eb[{std::min(v, w), std::max(v, w)}] += share;
        delta[static_cast<std::size_t>(v)] += share;
      }
    }
  }
  return eb;  // each pair accumulated from both endpoints: counts are doubled
}

std::vector<int> component_labels(int n, const std::vector<std::set<int>>& adj) {
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (label[static_cast<std::size_t>(s)] >= 0) continue;
    label[static_cast<std::size_t>(s)] = next;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop_front();
      for (int u : adj[static_cast<std::size_t>(v)])
        if (label[static_cast<std::size_t>(u)] < 0) {
          label[static_cast<std::size_t>(u)] = next;
          queue.push_back(u);
        }
    }
    ++next;
  }
  return label;
}

}  // namespace

// Iterative removal of the highest-betweenness edge; the returned partition
// is the component structure with the best modularity seen along the way.
Cover girvan_newman(const Graph& g) {
  int n = g.node_count();
  if (g.edge_count() == 0) return Cover::singletons(n);
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (const auto& e : g.edges()) {
    adj[static_cast<std::size_t>(e.u)].insert(e.v);
    adj[static_cast<std::size_t>(e.v)].insert(e.u);
  }

  auto eval = [&](const std::vector<int>& label) {
    int groups = *std::max_element(label.begin(), label.end()) + 1;
    std::vector<std::vector<int>> comms(static_cast<std::size_t>(groups));
    for (int v = 0; v < n; ++v)
      comms[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])].push_back(v);
    return modularity(g, Cover(n, std::move(comms)));
  };

  std::vector<int> best_label = component_labels(n, adj);
  double best_q = eval(best_label);
  int last_components = *std::max_element(best_label.begin(), best_label.end()) + 1;

  long long remaining = g.edge_count();
  while (remaining > 0) {
    auto eb = edge_betweenness(n, adj);
    std::pair<int, int> victim{-1, -1};
    double top = -1.0;
    for (const auto& [edge, score] : eb)
      if (score > top) {
        top = score;
        victim = edge;
      }
    if (victim.first < 0) break;
    adj[static_cast<std::size_t>(victim.first)].erase(victim.second);
    adj[static_cast<std::size_t>(victim.second)].erase(victim.first);
    --remaining;
    auto label = component_labels(n, adj);
    int components = *std::max_element(label.begin(), label.end()) + 1;
    if (components != last_components) {
      last_components = components;
      double q = eval(label);
      if (q > best_q + 1e-12) {
        best_q = q;
        best_label = label;
      }
    }
  }
  int groups = compact_labels(best_label);
  return labels_to_cover(n, best_label, groups);
}

}  // namespace asnkit::detail
