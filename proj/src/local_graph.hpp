#pragma once

// Internal weighted graph with self-loops, used by the move-and-aggregate
// optimizers (louvain, two-level map equation). Self-loop weight w adds 2w
// to a node's strength, matching the quotient of an undirected graph.

#include <utility>
#include <vector>

#include "asnkit/graph.hpp"

namespace asnkit::detail {

struct LocalGraph {
  int n = 0;
  std::vector<std::vector<std::pair<int, double>>> adj;  // no self entries
  std::vector<double> selfw;
  std::vector<double> strength;  // sum of incident weights + 2 * selfw
  double strength_total = 0.0;

  static LocalGraph from(const Graph& g) {
    LocalGraph lg;
    lg.n = g.node_count();
    lg.adj.resize(static_cast<std::size_t>(lg.n));
    lg.selfw.assign(static_cast<std::size_t>(lg.n), 0.0);
    lg.strength.assign(static_cast<std::size_t>(lg.n), 0.0);
    for (int v = 0; v < lg.n; ++v) {
      lg.adj[static_cast<std::size_t>(v)] = g.neighbors(v);
      lg.strength[static_cast<std::size_t>(v)] = g.strength(v);
      lg.strength_total += g.strength(v);
    }
    return lg;
  }

  /// Quotient by labels (0..k-1): intra-community weight becomes self-loops.
  LocalGraph quotient(const std::vector<int>& label, int groups) const {
    LocalGraph q;
    q.n = groups;
    q.adj.resize(static_cast<std::size_t>(groups));
    q.selfw.assign(static_cast<std::size_t>(groups), 0.0);
    q.strength.assign(static_cast<std::size_t>(groups), 0.0);
    std::vector<std::vector<double>> acc(static_cast<std::size_t>(groups));
    for (auto& row : acc) row.assign(static_cast<std::size_t>(groups), 0.0);
    for (int v = 0; v < n; ++v) {
      int cv = label[static_cast<std::size_t>(v)];
      q.selfw[static_cast<std::size_t>(cv)] += selfw[static_cast<std::size_t>(v)];
      for (auto [u, w] : adj[static_cast<std::size_t>(v)]) {
        if (u < v) continue;  // each undirected edge once
        int cu = label[static_cast<std::size_t>(u)];
        if (cu == cv)
          q.selfw[static_cast<std::size_t>(cv)] += w;
        else
          acc[static_cast<std::size_t>(cv)][static_cast<std::size_t>(cu)] += w;
      }
    }
    for (int a = 0; a < groups; ++a)
      for (int b = 0; b < groups; ++b) {
        double w = acc[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +
                   acc[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
        if (a < b && w > 0.0) {
          q.adj[static_cast<std::size_t>(a)].emplace_back(b, w);
          q.adj[static_cast<std::size_t>(b)].emplace_back(a, w);
        }
      }
    for (int c = 0; c < groups; ++c) {
      double s = 2.0 * q.selfw[static_cast<std::size_t>(c)];
      for (auto [u, w] : q.adj[static_cast<std::size_t>(c)]) {
        (void)u;
        s += w;
      }
      q.strength[static_cast<std::size_t>(c)] = s;
      q.strength_total += s;
    }
    return q;
  }
};

/// Renumber labels densely in order of first appearance; returns group count.
inline int compact_labels(std::vector<int>& label) {
  std::vector<int> remap(label.size(), -1);
  int next = 0;
  for (auto& l : label) {
    if (remap[static_cast<std::size_t>(l)] < 0) remap[static_cast<std::size_t>(l)] = next++;
    l = remap[static_cast<std::size_t>(l)];
  }
  return next;
}

/// Labels to a cover (total by construction).
inline Cover labels_to_cover(int n, const std::vector<int>& label, int groups) {
  std::vector<std::vector<int>> comms(static_cast<std::size_t>(groups));
  for (int v = 0; v < n; ++v) comms[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])].push_back(v);
  std::erase_if(comms, [](const auto& c) { return c.empty(); });
  return Cover(n, std::move(comms));
}

}  // namespace asnkit::detail
