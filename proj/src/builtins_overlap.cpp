#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <vector>

#include "builtins.hpp"

namespace asnkit::detail {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    parent[static_cast<std::size_t>(b)] = a;
    return true;
  }
};

void enumerate_kcliques(const Graph& g, int k, std::vector<std::vector<int>>& out) {
  const std::size_t clique_cap = 2'000'000;
  std::vector<int> current;
  std::vector<int> candidates;
  // recursive extension over ascending ids
  std::function<void(const std::vector<int>&)> extend = [&](const std::vector<int>& cands) {
    if (static_cast<int>(current.size()) == k) {
      out.push_back(current);
      if (out.size() > clique_cap) throw ValueError("kclique: clique enumeration exploded");
      return;
    }
    for (std::size_t i = 0; i < cands.size(); ++i) {
      int v = cands[i];
      std::vector<int> next;
      for (std::size_t j = i + 1; j < cands.size(); ++j)
        if (g.has_edge(v, cands[j])) next.push_back(cands[j]);
      if (static_cast<int>(current.size()) + 1 + static_cast<int>(next.size()) < k) continue;
      current.push_back(v);
      extend(next);
      current.pop_back();
    }
  };
  std::vector<int> all(static_cast<std::size_t>(g.node_count()));
  std::iota(all.begin(), all.end(), 0);
  extend(all);
}

}  // namespace

// k-clique percolation: communities are unions of k-cliques connected
// through shared (k-1)-sub-cliques. Nodes outside any k-clique stay
// singletons.
Cover kclique(const Graph& g, int k) {
  if (k < 2 || k > 12) throw ValueError("kclique: k must be in [2, 12]");
  std::vector<std::vector<int>> cliques;
  enumerate_kcliques(g, k, cliques);
  UnionFind uf(cliques.size());
  std::map<std::vector<int>, int> face_owner;  // (k-1)-subset -> first clique seen
  for (std::size_t ci = 0; ci < cliques.size(); ++ci) {
    const auto& clique = cliques[ci];
    for (int drop = 0; drop < k; ++drop) {
      std::vector<int> face;
      face.reserve(static_cast<std::size_t>(k - 1));
      for (int j = 0; j < k; ++j)
        if (j != drop) face.push_back(clique[static_cast<std::size_t>(j)]);
      auto [it, inserted] = face_owner.emplace(std::move(face), static_cast<int>(ci));
      if (!inserted) uf.unite(it->second, static_cast<int>(ci));
    }
  }
  std::map<int, std::set<int>> groups;
  for (std::size_t ci = 0; ci < cliques.size(); ++ci) {
    int root = uf.find(static_cast<int>(ci));
    groups[root].insert(cliques[ci].begin(), cliques[ci].end());
  }
  std::vector<std::vector<int>> comms;
  comms.reserve(groups.size());
  for (auto& [root, nodes] : groups) comms.emplace_back(nodes.begin(), nodes.end());
  return Cover::with_singleton_completion(g.node_count(), std::move(comms));
}

// Link clustering: single linkage over edge pairs ranked by the Jaccard
// similarity of the endpoints' inclusive neighborhoods, cut at the maximum
// partition density. The node cover collects each node's edge clusters.
Cover hlc(const Graph& g) {
  int n = g.node_count();
  long long m = g.edge_count();
  if (m == 0) return Cover::singletons(n);

  std::vector<std::vector<int>> inclusive(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto& nb = inclusive[static_cast<std::size_t>(v)];
    nb.push_back(v);
    for (auto [u, w] : g.neighbors(v)) {
      (void)w;
      nb.push_back(u);
    }
    std::sort(nb.begin(), nb.end());
  }
  auto jaccard = [&](int a, int b) {
    const auto& x = inclusive[static_cast<std::size_t>(a)];
    const auto& y = inclusive[static_cast<std::size_t>(b)];
    std::size_t i = 0, j = 0, common = 0;
    while (i < x.size() && j < y.size()) {
      if (x[i] == y[j]) {
        ++common;
        ++i;
        ++j;
      } else if (x[i] < y[j]) {
        ++i;
      } else {
        ++j;
      }
    }
    return static_cast<double>(common) /
           static_cast<double>(x.size() + y.size() - common);
  };

  // edge index per endpoint
  std::vector<std::vector<std::pair<int, int>>> incident(static_cast<std::size_t>(n));
  const auto& edges = g.edges();
  for (int ei = 0; ei < static_cast<int>(edges.size()); ++ei) {
    incident[static_cast<std::size_t>(edges[static_cast<std::size_t>(ei)].u)].emplace_back(
        edges[static_cast<std::size_t>(ei)].v, ei);
    incident[static_cast<std::size_t>(edges[static_cast<std::size_t>(ei)].v)].emplace_back(
        edges[static_cast<std::size_t>(ei)].u, ei);
  }

  struct Pair {
    double sim;
    int e1, e2;
  };
  std::vector<Pair> pairs;
  for (int shared = 0; shared < n; ++shared) {
    const auto& inc = incident[static_cast<std::size_t>(shared)];
    for (std::size_t i = 0; i < inc.size(); ++i)
      for (std::size_t j = i + 1; j < inc.size(); ++j)
        pairs.push_back({jaccard(inc[i].first, inc[j].first),
                         std::min(inc[i].second, inc[j].second),
                         std::max(inc[i].second, inc[j].second)});
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return std::tie(a.e1, a.e2) < std::tie(b.e1, b.e2);
  });

  // single linkage with partition-density tracking, level = distinct sim
  UnionFind uf(static_cast<std::size_t>(m));
  std::vector<long long> edge_count(static_cast<std::size_t>(m), 1);
  std::vector<std::set<int>> node_set(static_cast<std::size_t>(m));
  for (int ei = 0; ei < static_cast<int>(m); ++ei) {
    node_set[static_cast<std::size_t>(ei)].insert(edges[static_cast<std::size_t>(ei)].u);
    node_set[static_cast<std::size_t>(ei)].insert(edges[static_cast<std::size_t>(ei)].v);
  }
  auto cluster_term = [&](int root) {
    double mc = static_cast<double>(edge_count[static_cast<std::size_t>(root)]);
    double nc = static_cast<double>(node_set[static_cast<std::size_t>(root)].size());
    if (nc <= 2.0) return 0.0;
    return mc * (mc - (nc - 1.0)) / ((nc - 2.0) * (nc - 1.0));
  };

  double density_sum = 0.0;  // sum of per-cluster terms (D = 2/M * sum)
  double best_density = density_sum;
  long long best_merge_count = 0;
  long long merges_done = 0;
  std::vector<std::pair<int, int>> merge_log;

  std::size_t idx = 0;
  while (idx < pairs.size()) {
    double level_sim = pairs[idx].sim;
    while (idx < pairs.size() && pairs[idx].sim == level_sim) {
      int a = uf.find(pairs[idx].e1);
      int b = uf.find(pairs[idx].e2);
      if (a != b) {
        density_sum -= cluster_term(a) + cluster_term(b);
        uf.unite(a, b);
        int root = uf.find(a);
        int child = root == a ? b : a;
        edge_count[static_cast<std::size_t>(root)] += edge_count[static_cast<std::size_t>(child)];
        auto& big = node_set[static_cast<std::size_t>(root)];
        auto& small = node_set[static_cast<std::size_t>(child)];
        big.insert(small.begin(), small.end());
        small.clear();
        density_sum += cluster_term(root);
        merge_log.emplace_back(pairs[idx].e1, pairs[idx].e2);
        ++merges_done;
      }
      ++idx;
    }
    if (density_sum > best_density + 1e-12) {
      best_density = density_sum;
      best_merge_count = merges_done;
    }
  }

  // replay to the best level
  UnionFind cut(static_cast<std::size_t>(m));
  for (long long i = 0; i < best_merge_count; ++i)
    cut.unite(merge_log[static_cast<std::size_t>(i)].first,
              merge_log[static_cast<std::size_t>(i)].second);
  std::map<int, std::set<int>> comms;
  for (int ei = 0; ei < static_cast<int>(m); ++ei) {
    int root = cut.find(ei);
    comms[root].insert(edges[static_cast<std::size_t>(ei)].u);
    comms[root].insert(edges[static_cast<std::size_t>(ei)].v);
  }
  std::vector<std::vector<int>> out;
  out.reserve(comms.size());
  for (auto& [root, nodes] : comms) out.emplace_back(nodes.begin(), nodes.end());
  return Cover::with_singleton_completion(n, std::move(out));
}

// Agglomerative clustering of adjacency rows under cosine similarity with
// average linkage, stopped at `cut` clusters.
Cover nsim_aggl(const Graph& g, int cut) {
  int n = g.node_count();
  if (cut < 1) throw ValueError("nsim_aggl: cut must be >= 1");
  int target = std::min(cut, n);

  std::vector<std::vector<double>> sim(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
  std::vector<double> norm(static_cast<std::size_t>(n), 0.0);
  for (int v = 0; v < n; ++v) {
    double s = 0.0;
    for (auto [u, w] : g.neighbors(v)) {
      (void)u;
      s += w * w;
    }
    norm[static_cast<std::size_t>(v)] = std::sqrt(s);
  }
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (norm[static_cast<std::size_t>(a)] == 0.0 || norm[static_cast<std::size_t>(b)] == 0.0)
        continue;
      double dot = 0.0;
      const auto& na = g.neighbors(a);
      const auto& nb = g.neighbors(b);
      std::size_t i = 0, j = 0;
      while (i < na.size() && j < nb.size()) {
        if (na[i].first == nb[j].first) {
          dot += na[i].second * nb[j].second;
          ++i;
          ++j;
        } else if (na[i].first < nb[j].first) {
          ++i;
        } else {
          ++j;
        }
      }
      sim[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          dot / (norm[static_cast<std::size_t>(a)] * norm[static_cast<std::size_t>(b)]);
      sim[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] =
          sim[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
  }

  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  std::vector<long long> size(static_cast<std::size_t>(n), 1);
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  int clusters = n;
  while (clusters > target) {
    double best = -std::numeric_limits<double>::infinity();
    std::pair<int, int> who{-1, -1};
    for (int a = 0; a < n; ++a) {
      if (!alive[static_cast<std::size_t>(a)]) continue;
      for (int b = a + 1; b < n; ++b) {
        if (!alive[static_cast<std::size_t>(b)]) continue;
        if (sim[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] > best) {
          best = sim[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
          who = {a, b};
        }
      }
    }
    if (who.first < 0) break;
    auto [a, b] = who;
    // average linkage update into a
    for (int c = 0; c < n; ++c) {
      if (!alive[static_cast<std::size_t>(c)] || c == a || c == b) continue;
      double merged = (static_cast<double>(size[static_cast<std::size_t>(a)]) *
                           sim[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] +
                       static_cast<double>(size[static_cast<std::size_t>(b)]) *
                           sim[static_cast<std::size_t>(b)][static_cast<std::size_t>(c)]) /
                      static_cast<double>(size[static_cast<std::size_t>(a)] +
                                          size[static_cast<std::size_t>(b)]);
      sim[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] = merged;
      sim[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)] = merged;
    }
    size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
    alive[static_cast<std::size_t>(b)] = 0;
    for (int v = 0; v < n; ++v)
      if (label[static_cast<std::size_t>(v)] == b) label[static_cast<std::size_t>(v)] = a;
    --clusters;
  }
  int groups = compact_labels(label);
  return labels_to_cover(n, label, groups);
}

}  // namespace asnkit::detail
