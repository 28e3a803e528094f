#include <algorithm>
#include <map>
#include <numeric>
#include <vector>

#include "asnkit/rng.hpp"
#include "builtins.hpp"
#include "local_graph.hpp"

namespace asnkit::detail {

// Asynchronous majority label propagation. Nodes adopt the label carrying
// the largest incident weight; ties break uniformly at random. Stops when a
// sweep changes nothing (cap 100 sweeps).
Cover labelprop(const Graph& g, std::uint64_t seed) {
  int n = g.node_count();
  Rng rng(seed);
  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  std::vector<int> order(label);

  for (int sweep = 0; sweep < 100; ++sweep) {
    rng.shuffle(order);
    bool changed = false;
    for (int v : order) {
      const auto& nbrs = g.neighbors(v);
      if (nbrs.empty()) continue;
      std::map<int, double> weight_of;  // ordered for deterministic ties
      for (auto [u, w] : nbrs) weight_of[label[static_cast<std::size_t>(u)]] += w;
      double best = 0.0;
      for (const auto& [l, w] : weight_of) best = std::max(best, w);
      std::vector<int> winners;
      for (const auto& [l, w] : weight_of)
        if (w == best) winners.push_back(l);
      int cur = label[static_cast<std::size_t>(v)];
      if (std::find(winners.begin(), winners.end(), cur) != winners.end()) continue;
      int pick = winners[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(winners.size()) - 1))];
      label[static_cast<std::size_t>(v)] = pick;
      changed = true;
    }
    if (!changed) break;
  }
  int groups = compact_labels(label);
  return labels_to_cover(n, label, groups);
}

// Speaker-listener label propagation. Each node keeps a label memory seeded
// with its own id; for 20 rounds every listener collects one label from each
// neighbor (drawn from the speaker's memory in proportion to frequency) and
// stores the most frequent. Labels seen in at least fraction r of a node's
// memory survive; every surviving label forms one community.
Cover slpa(const Graph& g, double r, std::uint64_t seed) {
  if (!(r > 0.0 && r <= 1.0)) throw ValueError("slpa: r must be in (0, 1]");
  int n = g.node_count();
  const int rounds = 20;
  Rng rng(seed);
  std::vector<std::vector<int>> memory(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) memory[static_cast<std::size_t>(v)].push_back(v);

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int round = 0; round < rounds && round < 100; ++round) {
    rng.shuffle(order);
    for (int listener : order) {
      const auto& nbrs = g.neighbors(listener);
      if (nbrs.empty()) continue;
      std::map<int, int> received;
      for (auto [speaker, w] : nbrs) {
        (void)w;
        const auto& mem = memory[static_cast<std::size_t>(speaker)];
        int token = mem[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(mem.size()) - 1))];
        ++received[token];
      }
      int best = 0;
      for (const auto& [l, c] : received) best = std::max(best, c);
      std::vector<int> winners;
      for (const auto& [l, c] : received)
        if (c == best) winners.push_back(l);
      int pick = winners[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(winners.size()) - 1))];
      memory[static_cast<std::size_t>(listener)].push_back(pick);
    }
  }

  std::vector<std::vector<int>> comms_by_label;
  std::map<int, std::size_t> slot_of;
  for (int v = 0; v < n; ++v) {
    const auto& mem = memory[static_cast<std::size_t>(v)];
    std::map<int, int> freq;
    for (int l : mem) ++freq[l];
    std::vector<int> kept;
    for (const auto& [l, c] : freq)
      if (static_cast<double>(c) / static_cast<double>(mem.size()) >= r) kept.push_back(l);
    if (kept.empty()) {
      int best_label = mem[0], best_count = 0;
      for (const auto& [l, c] : freq)
        if (c > best_count) {
          best_count = c;
          best_label = l;
        }
      kept.push_back(best_label);
    }
    for (int l : kept) {
      auto [it, inserted] = slot_of.emplace(l, comms_by_label.size());
      if (inserted) comms_by_label.emplace_back();
      comms_by_label[it->second].push_back(v);
    }
  }
  // identical node sets under different labels collapse to one community
  for (auto& c : comms_by_label) std::sort(c.begin(), c.end());
  std::sort(comms_by_label.begin(), comms_by_label.end());
  comms_by_label.erase(std::unique(comms_by_label.begin(), comms_by_label.end()),
                       comms_by_label.end());
  return Cover::with_singleton_completion(g.node_count(), std::move(comms_by_label));
}

}  // namespace asnkit::detail
