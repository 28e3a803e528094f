#include "asnkit/lfr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "asnkit/rng.hpp"

namespace asnkit {

void LfrParams::validate() const {
  if (n <= 0) throw ValueError("lfr: n must be positive");
  if (!(mu > 0.0 && mu < 1.0)) throw ValueError("lfr: mu must be in (0,1)");
  if (!(k_avg >= 1.0)) throw ValueError("lfr: k_avg must be >= 1");
  if (!(k_avg <= k_max)) throw ValueError("lfr: k_avg must be <= k_max");
  if (!(k_max < n)) throw ValueError("lfr: k_max must be < n");
  if (!(c_min >= 1 && c_min <= c_max)) throw ValueError("lfr: need 1 <= c_min <= c_max");
  if (!(c_max <= n)) throw ValueError("lfr: c_max must be <= n");
  if (o_n < 0 || o_n > n) throw ValueError("lfr: o_n must be in [0, n]");
  if (o_m < 1) throw ValueError("lfr: o_m must be >= 1");
  if (o_n > 0 && o_m < 2) throw ValueError("lfr: o_m must be >= 2 when o_n > 0");
  if (!(tau1 > 1.0)) throw ValueError("lfr: tau1 must be > 1");
  if (!(tau2 > 0.0)) throw ValueError("lfr: tau2 must be > 0");
}

LfrParams lfr_desk_params(int n, double mu, bool overlapping, std::uint64_t seed) {
  LfrParams p;
  p.n = n;
  p.mu = mu;
  p.k_avg = 6.0;
  p.k_max = std::max(static_cast<int>(std::ceil(n / 5.0)),
                     static_cast<int>(2 * p.k_avg));
  p.c_min = 5;
  p.c_max = static_cast<int>(std::ceil(n / 4.0));
  if (overlapping) {
    p.o_n = static_cast<int>(std::ceil(n / 10.0));
    p.o_m = 2;
  }
  p.seed = seed;
  return p;
}

namespace {

std::vector<double> powerlaw_cumulative(double exponent, int x_min, int x_max) {
  std::vector<double> cum;
  cum.reserve(static_cast<std::size_t>(x_max - x_min + 1));
  double total = 0.0;
  for (int x = x_min; x <= x_max; ++x) {
    total += std::pow(static_cast<double>(x), -exponent);
    cum.push_back(total);
  }
  return cum;
}

int sample_powerlaw_one(Rng& rng, const std::vector<double>& cum, int x_min) {
  return x_min + static_cast<int>(rng.pick_cumulative(cum));
}

}  // namespace

double truncated_powerlaw_mean(double exponent, int x_min, int x_max) {
  double num = 0.0, den = 0.0;
  for (int x = x_min; x <= x_max; ++x) {
    double p = std::pow(static_cast<double>(x), -exponent);
    num += x * p;
    den += p;
  }
  return num / den;
}

std::vector<int> sample_truncated_powerlaw(double exponent, int x_min, int x_max,
                                           int count, std::uint64_t seed) {
  if (x_min < 1 || x_min > x_max) throw ValueError("powerlaw: empty support");
  if (count < 0) throw ValueError("powerlaw: negative count");
  if (!(exponent > 0.0)) throw ValueError("powerlaw: exponent must be positive");
  Rng rng(seed);
  auto cum = powerlaw_cumulative(exponent, x_min, x_max);
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(sample_powerlaw_one(rng, cum, x_min));
  return out;
}

namespace {

struct Membership {
  std::vector<std::vector<int>> node_comms;   // node -> communities
  std::vector<std::vector<int>> node_shares;  // node -> internal stubs per community
  std::vector<std::vector<int>> members;      // community -> nodes
};

// Degree sequence with expected mean exactly k_avg: mix two adjacent lower
// cutoffs of the truncated power law.
std::vector<int> sample_degrees(const LfrParams& p, Rng& rng) {
  int lo = 1;
  // find largest cutoff whose truncated mean is still <= k_avg
  while (lo < p.k_max && truncated_powerlaw_mean(p.tau1, lo + 1, p.k_max) <= p.k_avg) ++lo;
  double mean_lo = truncated_powerlaw_mean(p.tau1, lo, p.k_max);
  double mix = 0.0;
  if (lo < p.k_max) {
    double mean_hi = truncated_powerlaw_mean(p.tau1, lo + 1, p.k_max);
    if (mean_hi > mean_lo)
      mix = std::clamp((p.k_avg - mean_lo) / (mean_hi - mean_lo), 0.0, 1.0);
  }
  auto cum_lo = powerlaw_cumulative(p.tau1, lo, p.k_max);
  auto cum_hi = lo < p.k_max ? powerlaw_cumulative(p.tau1, lo + 1, p.k_max)
                             : std::vector<double>{};
  std::vector<int> deg(static_cast<std::size_t>(p.n));
  for (auto& d : deg)
    d = (mix > 0.0 && rng.bernoulli(mix)) ? sample_powerlaw_one(rng, cum_hi, lo + 1)
                                          : sample_powerlaw_one(rng, cum_lo, lo);
  long long total = std::accumulate(deg.begin(), deg.end(), 0LL);
  if (total % 2 != 0) {  // stub parity
    for (auto& d : deg)
      if (d < p.k_max) {
        ++d;
        break;
      }
  }
  return deg;
}

// Community sizes from the tau2 power law, summing exactly to the number of
// membership slots.
std::vector<int> sample_community_sizes(const LfrParams& p, Rng& rng, long long target) {
  auto cum = powerlaw_cumulative(p.tau2, p.c_min, p.c_max);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<int> sizes;
    long long sum = 0;
    while (sum < target) {
      int s = sample_powerlaw_one(rng, cum, p.c_min);
      sizes.push_back(s);
      sum += s;
    }
    long long excess = sum - target;
    if (excess == 0) return sizes;
    if (sizes.back() - excess >= p.c_min) {
      sizes.back() -= static_cast<int>(excess);
      return sizes;
    }
    // drop the overshooting community and retry
  }
  throw GenerationError("lfr: could not realize community sizes summing to " +
                        std::to_string(target) + " with c_min=" + std::to_string(p.c_min) +
                        ", c_max=" + std::to_string(p.c_max));
}

// Split an internal degree into `parts` near-equal shares.
std::vector<int> split_shares(int internal, int parts) {
  std::vector<int> shares(static_cast<std::size_t>(parts), internal / parts);
  for (int i = 0; i < internal % parts; ++i) ++shares[static_cast<std::size_t>(i)];
  return shares;
}

// Assign membership slots so that every internal-degree share fits its
// community (share <= size - 1). Hardest nodes first, random feasible
// community per share. Returns false when stuck.
bool assign_memberships(const LfrParams& p, const std::vector<int>& sizes,
                        const std::vector<int>& internal, const std::vector<char>& overlapping,
                        Rng& rng, Membership& out) {
  int n = p.n;
  int comm_count = static_cast<int>(sizes.size());
  out.node_comms.assign(static_cast<std::size_t>(n), {});
  out.node_shares.assign(static_cast<std::size_t>(n), {});
  out.members.assign(static_cast<std::size_t>(comm_count), {});

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    int ma = overlapping[static_cast<std::size_t>(a)]
                 ? (internal[static_cast<std::size_t>(a)] + p.o_m - 1) / p.o_m
                 : internal[static_cast<std::size_t>(a)];
    int mb = overlapping[static_cast<std::size_t>(b)]
                 ? (internal[static_cast<std::size_t>(b)] + p.o_m - 1) / p.o_m
                 : internal[static_cast<std::size_t>(b)];
    return ma > mb;
  });

  std::vector<int> free_slots(sizes.begin(), sizes.end());
  for (int v : order) {
    int parts = overlapping[static_cast<std::size_t>(v)] ? p.o_m : 1;
    auto shares = split_shares(internal[static_cast<std::size_t>(v)], parts);
    std::vector<int> chosen;
    for (int share : shares) {
      std::vector<int> feasible;
      for (int c = 0; c < comm_count; ++c) {
        if (free_slots[static_cast<std::size_t>(c)] <= 0) continue;
        if (share > sizes[static_cast<std::size_t>(c)] - 1) continue;
        if (std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
        feasible.push_back(c);
      }
      if (feasible.empty()) return false;
      int c = feasible[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(feasible.size()) - 1))];
      chosen.push_back(c);
      --free_slots[static_cast<std::size_t>(c)];
      out.node_comms[static_cast<std::size_t>(v)].push_back(c);
      out.node_shares[static_cast<std::size_t>(v)].push_back(share);
      out.members[static_cast<std::size_t>(c)].push_back(v);
    }
  }
  return true;
}

struct WiredEdge {
  int u, v;
  int pool;  // community index, or -1 for the inter-community pool
};

std::uint64_t ekey(int u, int v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

// Pair up stubs uniformly at random.
std::vector<std::pair<int, int>> pair_stubs(std::vector<int> stubs, Rng& rng) {
  rng.shuffle(stubs);
  std::vector<std::pair<int, int>> out;
  out.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) out.emplace_back(stubs[i], stubs[i + 1]);
  return out;
}

class Rewirer {
 public:
  Rewirer(int n, const Membership& mem) : share_comms_(static_cast<std::size_t>(n)) {
    for (int v = 0; v < n; ++v)
      for (int c : mem.node_comms[static_cast<std::size_t>(v)])
        share_comms_[static_cast<std::size_t>(v)].push_back(c);
    for (auto& cs : share_comms_) std::sort(cs.begin(), cs.end());
  }

  bool same_community(int u, int v) const {
    const auto& a = share_comms_[static_cast<std::size_t>(u)];
    const auto& b = share_comms_[static_cast<std::size_t>(v)];
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) return true;
      if (a[i] < b[j])
        ++i;
      else
        ++j;
    }
    return false;
  }

  bool violates(const WiredEdge& e, const std::unordered_multiset<std::uint64_t>& counts) const {
    if (e.u == e.v) return true;
    if (counts.count(ekey(e.u, e.v)) > 1) return true;
    if (e.pool < 0 && same_community(e.u, e.v)) return true;
    return false;
  }

  // Degree-preserving double swaps within each pool until simple and clean.
  bool repair(std::vector<WiredEdge>& edges, Rng& rng) {
    std::unordered_multiset<std::uint64_t> counts;
    for (const auto& e : edges) counts.insert(ekey(e.u, e.v));
    std::vector<std::vector<std::size_t>> by_pool_index;
    std::vector<int> pool_of;  // dense pool ids
    std::unordered_map<int, int> pool_map;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto [it, inserted] = pool_map.emplace(edges[i].pool, static_cast<int>(by_pool_index.size()));
      if (inserted) by_pool_index.emplace_back();
      by_pool_index[static_cast<std::size_t>(it->second)].push_back(i);
    }

    for (int sweep = 0; sweep < 200; ++sweep) {
      bool any_violation = false;
      bool progressed = false;
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (!violates(edges[i], counts)) continue;
        any_violation = true;
        const auto& pool = by_pool_index[static_cast<std::size_t>(pool_map[edges[i].pool])];
        if (pool.size() < 2) return false;
        for (int attempt = 0; attempt < 60; ++attempt) {
          std::size_t j = pool[static_cast<std::size_t>(
              rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
          if (j == i) continue;
          WiredEdge a = edges[i], b = edges[j];
          bool cross = rng.bernoulli(0.5);
          WiredEdge na{a.u, cross ? b.u : b.v, a.pool};
          WiredEdge nb{cross ? b.v : b.u, a.v, b.pool};
          long long before = violates(a, counts) + violates(b, counts);
          counts.erase(counts.find(ekey(a.u, a.v)));
          counts.erase(counts.find(ekey(b.u, b.v)));
          counts.insert(ekey(na.u, na.v));
          counts.insert(ekey(nb.u, nb.v));
          long long after = violates(na, counts) + violates(nb, counts);
          if (after < before) {
            edges[i] = na;
            edges[j] = nb;
            progressed = true;
            break;
          }
          counts.erase(counts.find(ekey(na.u, na.v)));
          counts.erase(counts.find(ekey(nb.u, nb.v)));
          counts.insert(ekey(a.u, a.v));
          counts.insert(ekey(b.u, b.v));
        }
      }
      if (!any_violation) return true;
      if (!progressed) return false;
    }
    return false;
  }

 private:
  std::vector<std::vector<int>> share_comms_;
};

struct Attempt {
  Graph graph;
  Cover cover;
  double mu_hat = 0.0;
  double mean_degree = 0.0;
};

bool try_generate(const LfrParams& p, Rng& rng, Attempt& out, std::string& why) {
  auto degrees = sample_degrees(p, rng);

  // overlap selection
  std::vector<char> overlapping(static_cast<std::size_t>(p.n), 0);
  if (p.o_n > 0) {
    std::vector<int> ids(static_cast<std::size_t>(p.n));
    std::iota(ids.begin(), ids.end(), 0);
    rng.shuffle(ids);
    for (int i = 0; i < p.o_n; ++i) overlapping[static_cast<std::size_t>(ids[i])] = 1;
  }

  // internal degrees via stochastic rounding: E[internal] = (1-mu) * d
  std::vector<int> internal(static_cast<std::size_t>(p.n));
  for (int v = 0; v < p.n; ++v) {
    double want = (1.0 - p.mu) * degrees[static_cast<std::size_t>(v)];
    int base = static_cast<int>(std::floor(want));
    int value = base + (rng.bernoulli(want - base) ? 1 : 0);
    internal[static_cast<std::size_t>(v)] = std::min(value, degrees[static_cast<std::size_t>(v)]);
  }

  // feasibility: the largest per-community share must fit in the largest community
  for (int v = 0; v < p.n; ++v) {
    int parts = overlapping[static_cast<std::size_t>(v)] ? p.o_m : 1;
    int biggest = (internal[static_cast<std::size_t>(v)] + parts - 1) / parts;
    if (biggest > p.c_max - 1) {
      why = "internal degree " + std::to_string(biggest) + " of node " + std::to_string(v) +
            " cannot fit a community of size <= " + std::to_string(p.c_max);
      return false;
    }
  }

  long long slots = static_cast<long long>(p.n) +
                    static_cast<long long>(p.o_n) * (p.o_m - 1);
  auto sizes = sample_community_sizes(p, rng, slots);
  if (static_cast<int>(sizes.size()) < (p.o_n > 0 ? p.o_m : 1)) {
    why = "fewer communities than memberships per overlapping node";
    return false;
  }

  Membership mem;
  if (!assign_memberships(p, sizes, internal, overlapping, rng, mem)) {
    why = "membership assignment could not satisfy internal-degree bounds";
    return false;
  }

  // per-community parity: move one stub from the largest share to the
  // external pool when a community's internal stub count is odd
  std::vector<int> external(static_cast<std::size_t>(p.n));
  for (int v = 0; v < p.n; ++v)
    external[static_cast<std::size_t>(v)] =
        degrees[static_cast<std::size_t>(v)] - internal[static_cast<std::size_t>(v)];
  int comm_count = static_cast<int>(sizes.size());
  for (int c = 0; c < comm_count; ++c) {
    long long sum = 0;
    for (int v : mem.members[static_cast<std::size_t>(c)]) {
      const auto& comms = mem.node_comms[static_cast<std::size_t>(v)];
      for (std::size_t k = 0; k < comms.size(); ++k)
        if (comms[k] == c) sum += mem.node_shares[static_cast<std::size_t>(v)][k];
    }
    if (sum % 2 == 0) continue;
    int best = -1, best_share = 0;
    for (int v : mem.members[static_cast<std::size_t>(c)]) {
      const auto& comms = mem.node_comms[static_cast<std::size_t>(v)];
      for (std::size_t k = 0; k < comms.size(); ++k)
        if (comms[k] == c && mem.node_shares[static_cast<std::size_t>(v)][k] > best_share) {
          best = v;
          best_share = mem.node_shares[static_cast<std::size_t>(v)][k];
        }
    }
    if (best < 0) {
      why = "community " + std::to_string(c) + " has odd internal stubs and no donor";
      return false;
    }
    const auto& comms = mem.node_comms[static_cast<std::size_t>(best)];
    for (std::size_t k = 0; k < comms.size(); ++k)
      if (comms[k] == c) {
        --mem.node_shares[static_cast<std::size_t>(best)][k];
        ++external[static_cast<std::size_t>(best)];
        break;
      }
  }

  // wire internal pools
  std::vector<WiredEdge> edges;
  for (int c = 0; c < comm_count; ++c) {
    std::vector<int> stubs;
    for (int v : mem.members[static_cast<std::size_t>(c)]) {
      const auto& comms = mem.node_comms[static_cast<std::size_t>(v)];
      for (std::size_t k = 0; k < comms.size(); ++k)
        if (comms[k] == c)
          stubs.insert(stubs.end(),
                       static_cast<std::size_t>(mem.node_shares[static_cast<std::size_t>(v)][k]), v);
    }
    for (auto [u, v] : pair_stubs(std::move(stubs), rng)) edges.push_back({u, v, c});
  }

  // wire the external pool
  {
    std::vector<int> stubs;
    for (int v = 0; v < p.n; ++v)
      stubs.insert(stubs.end(), static_cast<std::size_t>(external[static_cast<std::size_t>(v)]), v);
    if (stubs.size() % 2 != 0) {
      why = "external stub parity broken";  // cannot happen when total degree is even
      return false;
    }
    for (auto [u, v] : pair_stubs(std::move(stubs), rng)) edges.push_back({u, v, -1});
  }

  Rewirer rewirer(p.n, mem);
  if (!rewirer.repair(edges, rng)) {
    why = "rewiring could not produce a simple graph with clean boundaries";
    return false;
  }

  std::vector<Edge> simple;
  simple.reserve(edges.size());
  long long boundary = 0;
  for (const auto& e : edges) {
    simple.push_back({e.u, e.v, 1.0});
    if (e.pool < 0) ++boundary;
  }
  out.graph = Graph(p.n, std::move(simple), false);
  out.cover = Cover(p.n, mem.members);
  out.mu_hat = edges.empty() ? 0.0
                             : static_cast<double>(boundary) / static_cast<double>(edges.size());
  out.mean_degree = 2.0 * static_cast<double>(edges.size()) / static_cast<double>(p.n);
  return true;
}

}  // namespace

LfrResult generate_lfr(const LfrParams& params) {
  params.validate();
  std::string why = "unknown";
  for (int restart = 0; restart < 100; ++restart) {
    Rng rng(derive_seed(params.seed, "lfr-restart", std::to_string(restart)));
    Attempt attempt;
    bool ok = false;
    try {
      ok = try_generate(params, rng, attempt, why);
    } catch (const GenerationError& e) {
      why = e.what();
    }
    if (ok) {
      LfrResult res;
      res.graph = std::move(attempt.graph);
      res.ground_truth = std::move(attempt.cover);
      res.realized_mu = attempt.mu_hat;
      res.realized_mean_degree = attempt.mean_degree;
      res.restarts = restart;
      return res;
    }
  }
  throw GenerationError("lfr generation failed after 100 restarts: " + why);
}

}  // namespace asnkit
