#include <algorithm>
#include <cmath>
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

// Walktrap-style agglomeration: communities are close when their t-step
// random-walk profiles are close. Only adjacent communities merge; the
// returned partition is the max-modularity cut of the merge sequence.
Cover walktrap(const Graph& g, int t) {
  if (t < 1) throw ValueError("walktrap: t must be >= 1");
  int n = g.node_count();
  if (g.edge_count() == 0) return Cover::singletons(n);

  // t-step transition rows, dense (desk-scale graphs)
  std::vector<std::vector<double>> prob(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(n), 0.0));
  for (int v = 0; v < n; ++v) {
    if (g.degree(v) == 0) continue;
    prob[static_cast<std::size_t>(v)][static_cast<std::size_t>(v)] = 1.0;
  }
  std::vector<std::vector<double>> next(prob);
  for (int step = 0; step < t; ++step) {
    for (int v = 0; v < n; ++v) {
      auto& row = next[static_cast<std::size_t>(v)];
      std::fill(row.begin(), row.end(), 0.0);
      double sv = g.strength(v);
      if (sv <= 0.0) continue;
      for (auto [u, w] : g.neighbors(v)) {
        double share = w / sv;
        const auto& src = prob[static_cast<std::size_t>(u)];
        for (int k = 0; k < n; ++k) row[static_cast<std::size_t>(k)] += share * src[static_cast<std::size_t>(k)];
      }
    }
    std::swap(prob, next);
  }

  struct Comm {
    std::vector<int> members;
    std::vector<double> profile;  // mean member row
    std::set<int> adjacent;
  };
  std::map<int, Comm> live;
  std::vector<int> owner(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    owner[static_cast<std::size_t>(v)] = v;
    Comm c;
    c.members = {v};
    c.profile = prob[static_cast<std::size_t>(v)];
    live.emplace(v, std::move(c));
  }
  for (const auto& e : g.edges()) {
    live[e.u].adjacent.insert(e.v);
    live[e.v].adjacent.insert(e.u);
  }

  auto rdist = [&](const Comm& a, const Comm& b) {
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      double dk = g.strength(k);
      if (dk <= 0.0) continue;
      double diff = a.profile[static_cast<std::size_t>(k)] - b.profile[static_cast<std::size_t>(k)];
      sum += diff * diff / dk;
    }
    return sum;
  };
  auto ward = [&](const Comm& a, const Comm& b) {
    double na = static_cast<double>(a.members.size());
    double nb = static_cast<double>(b.members.size());
    return na * nb / (na + nb) * rdist(a, b) / static_cast<double>(n);
  };

  auto snapshot_q = [&]() {
    std::vector<std::vector<int>> comms;
    for (const auto& [id, c] : live) comms.push_back(c.members);
    return modularity(g, Cover(n, std::move(comms)));
  };

  double best_q = snapshot_q();
  std::vector<int> best_owner = owner;

  while (true) {
    double best_cost = std::numeric_limits<double>::infinity();
    std::pair<int, int> best_pair{-1, -1};
    for (const auto& [id, c] : live)
      for (int other : c.adjacent) {
        if (other <= id) continue;
        double cost = ward(c, live[other]);
        if (cost < best_cost - 1e-15) {
          best_cost = cost;
          best_pair = {id, other};
        }
      }
    if (best_pair.first < 0) break;  // no adjacent pairs left
    auto [a, b] = best_pair;
    Comm& ca = live[a];
    Comm& cb = live[b];
    double na = static_cast<double>(ca.members.size());
    double nb = static_cast<double>(cb.members.size());
    for (int k = 0; k < n; ++k)
      ca.profile[static_cast<std::size_t>(k)] =
          (na * ca.profile[static_cast<std::size_t>(k)] + nb * cb.profile[static_cast<std::size_t>(k)]) /
          (na + nb);
    for (int v : cb.members) {
      owner[static_cast<std::size_t>(v)] = a;
      ca.members.push_back(v);
    }
    for (int other : cb.adjacent) {
      if (other == a) continue;
      live[other].adjacent.erase(b);
      live[other].adjacent.insert(a);
      ca.adjacent.insert(other);
    }
    ca.adjacent.erase(b);
    ca.adjacent.erase(a);
    live.erase(b);
    double q = snapshot_q();
    if (q > best_q + 1e-12) {
      best_q = q;
      best_owner = owner;
    }
    if (live.size() <= 1) break;
  }

  int groups = compact_labels(best_owner);
  return labels_to_cover(n, best_owner, groups);
}

namespace {

double plogp_flow(double raw, double denom) {
  double p = raw / denom;
  return p > 0.0 ? p * std::log2(p) : 0.0;
}

// Variable part of the two-level map-equation codelength, raw weight units.
struct MapState {
  double denom = 0.0;                 // total strength (2W), constant across levels
  std::vector<double> exit_w;         // per-module boundary weight
  std::vector<double> module_p;       // per-module strength sum
  double exit_total = 0.0;

  double objective() const {
    double j = plogp_flow(exit_total, denom);
    for (std::size_t c = 0; c < exit_w.size(); ++c) {
      j -= 2.0 * plogp_flow(exit_w[c], denom);
      j += plogp_flow(exit_w[c] + module_p[c], denom);
    }
    return j;
  }
};

bool infomap_level(const LocalGraph& lg, std::vector<int>& label, double denom, Rng& rng) {
  int n = lg.n;
  MapState st;
  st.denom = denom;
  st.exit_w.assign(static_cast<std::size_t>(n), 0.0);
  st.module_p.assign(static_cast<std::size_t>(n), 0.0);
  for (int v = 0; v < n; ++v) {
    st.module_p[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])] +=
        lg.strength[static_cast<std::size_t>(v)];
    for (auto [u, w] : lg.adj[static_cast<std::size_t>(v)])
      if (label[static_cast<std::size_t>(u)] != label[static_cast<std::size_t>(v)])
        st.exit_w[static_cast<std::size_t>(label[static_cast<std::size_t>(v)])] += w;
  }
  for (double e : st.exit_w) st.exit_total += e;

  auto module_term = [&](std::size_t c) {
    return -2.0 * plogp_flow(st.exit_w[c], denom) +
           plogp_flow(st.exit_w[c] + st.module_p[c], denom);
  };

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  bool moved_ever = false;
  for (int pass = 0; pass < 100; ++pass) {
    rng.shuffle(order);
    int moves = 0;
    for (int v : order) {
      int home = label[static_cast<std::size_t>(v)];
      double link_v = lg.strength[static_cast<std::size_t>(v)] -
                      2.0 * lg.selfw[static_cast<std::size_t>(v)];
      std::map<int, double> to_module;
      to_module[home] += 0.0;
      for (auto [u, w] : lg.adj[static_cast<std::size_t>(v)])
        to_module[label[static_cast<std::size_t>(u)]] += w;

      double w_in_home = to_module[home];
      double pv = lg.strength[static_cast<std::size_t>(v)];
      // state with v extracted from home
      double exit_home_without =
          st.exit_w[static_cast<std::size_t>(home)] - (link_v - w_in_home) + w_in_home;

      double base = plogp_flow(st.exit_total, denom) +
                    module_term(static_cast<std::size_t>(home));
      double best_delta = -1e-12;
      int best_comm = home;
      for (const auto& [c, w_in_c] : to_module) {
        if (c == home) continue;
        double exit_home_new = exit_home_without;
        double exit_c_new = st.exit_w[static_cast<std::size_t>(c)] + link_v - 2.0 * w_in_c;
        double exit_total_new = st.exit_total -
                                st.exit_w[static_cast<std::size_t>(home)] -
                                st.exit_w[static_cast<std::size_t>(c)] + exit_home_new + exit_c_new;
        double after = plogp_flow(exit_total_new, denom);
        after += -2.0 * plogp_flow(exit_home_new, denom) +
                 plogp_flow(exit_home_new + st.module_p[static_cast<std::size_t>(home)] - pv, denom);
        after += -2.0 * plogp_flow(exit_c_new, denom) +
                 plogp_flow(exit_c_new + st.module_p[static_cast<std::size_t>(c)] + pv, denom);
        double before = base + module_term(static_cast<std::size_t>(c));
        double delta = after - before;
        if (delta < best_delta) {
          best_delta = delta;
          best_comm = c;
        }
      }
      if (best_comm != home) {
        double w_in_c = to_module[best_comm];
        st.exit_total -= st.exit_w[static_cast<std::size_t>(home)] +
                         st.exit_w[static_cast<std::size_t>(best_comm)];
        st.exit_w[static_cast<std::size_t>(home)] = exit_home_without;
        st.exit_w[static_cast<std::size_t>(best_comm)] += link_v - 2.0 * w_in_c;
        st.exit_total += st.exit_w[static_cast<std::size_t>(home)] +
                         st.exit_w[static_cast<std::size_t>(best_comm)];
        st.module_p[static_cast<std::size_t>(home)] -= pv;
        st.module_p[static_cast<std::size_t>(best_comm)] += pv;
        label[static_cast<std::size_t>(v)] = best_comm;
        ++moves;
      }
    }
    if (moves == 0) break;
    moved_ever = true;
  }
  return moved_ever;
}

}  // namespace

// Two-level map-equation minimization by greedy moves with aggregation.
Cover infomap_2l(const Graph& g, std::uint64_t seed) {
  int n = g.node_count();
  Rng rng(seed);
  LocalGraph lg = LocalGraph::from(g);
  if (lg.strength_total <= 0.0) return Cover::singletons(n);
  double denom = lg.strength_total;

  std::vector<int> node_to_group(static_cast<std::size_t>(n));
  std::iota(node_to_group.begin(), node_to_group.end(), 0);

  for (int level = 0; level < 50; ++level) {
    std::vector<int> label(static_cast<std::size_t>(lg.n));
    std::iota(label.begin(), label.end(), 0);
    bool moved = infomap_level(lg, label, denom, rng);
    int groups = compact_labels(label);
    for (auto& l : node_to_group) l = label[static_cast<std::size_t>(l)];
    if (!moved || groups == lg.n) break;
    lg = lg.quotient(label, groups);
  }
  int groups = compact_labels(node_to_group);
  return labels_to_cover(n, node_to_group, groups);
}

}  // namespace asnkit::detail
