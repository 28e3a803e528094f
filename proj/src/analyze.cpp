#include "asnkit/analyze.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "asnkit/rng.hpp"

namespace asnkit {

ClusterResult cluster_asn(const AsnNet& net, const std::string& clusterer_id,
                          std::uint64_t seed) {
  Graph g = net.to_graph();
  ClusterResult res;
  res.cover = run_builtin(builtin_dispatch_name(clusterer_id), g, {}, seed);
  if (g.edge_count() > 0) {
    std::vector<std::vector<int>> one(1);
    one[0].resize(static_cast<std::size_t>(g.node_count()));
    std::iota(one[0].begin(), one[0].end(), 0);
    res.codelength_one_module = map_codelength(g, Cover(g.node_count(), std::move(one)));
    if (res.cover.is_partition())
      res.codelength_clustered = map_codelength(g, res.cover);
  }
  return res;
}

std::vector<FeatureRow> feature_table(const Cover& asn_cover,
                                      const std::vector<std::string>& node_ids,
                                      const std::map<std::string, AlgorithmFlags>& metadata) {
  if (asn_cover.node_count() != static_cast<int>(node_ids.size()))
    throw ContractError("feature_table: cover and node id list disagree");
  std::vector<std::size_t> order(static_cast<std::size_t>(asn_cover.community_count()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return asn_cover.communities()[a].size() > asn_cover.communities()[b].size();
  });
  std::vector<FeatureRow> rows;
  int number = 1;
  for (std::size_t c : order) {
    const auto& comm = asn_cover.communities()[c];
    FeatureRow row;
    row.community = number++;
    row.size = static_cast<int>(comm.size());
    for (int v : comm) {
      const auto& id = node_ids[static_cast<std::size_t>(v)];
      auto it = metadata.find(id);
      if (it == metadata.end())
        throw ValueError("feature_table: no metadata for algorithm '" + id + "'");
      row.over += it->second.overlapping ? 1.0 : 0.0;
      row.spr += it->second.spreading ? 1.0 : 0.0;
      row.q += it->second.modularity_based ? 1.0 : 0.0;
      row.nsim += it->second.nsim ? 1.0 : 0.0;
    }
    row.over /= row.size;
    row.spr /= row.size;
    row.q /= row.size;
    row.nsim /= row.size;
    rows.push_back(row);
  }
  return rows;
}

RunStats run_statistics(const Graph& g, const Cover& cover, bool overlapping_algorithm) {
  RunStats st;
  st.num_communities = static_cast<double>(cover.community_count());
  double size_sum = 0.0, density_sum = 0.0, cond_sum = 0.0, ncut_sum = 0.0;
  for (const auto& comm : cover.communities()) {
    size_sum += static_cast<double>(comm.size());
    density_sum += community_density(g, comm);
    cond_sum += conductance(g, comm);
    ncut_sum += ncut(g, comm);
  }
  double k = st.num_communities;
  st.mean_size = size_sum / k;
  st.mean_density = density_sum / k;
  st.mean_conductance = cond_sum / k;
  st.mean_ncut = ncut_sum / k;
  if (g.edge_count() == 0)
    st.modularity = 0.0;
  else if (!overlapping_algorithm && cover.is_partition())
    st.modularity = modularity(g, cover);
  else
    st.modularity = lazar_modularity(g, cover);
  return st;
}

namespace {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1)) /
             std::sqrt(static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace

std::vector<StatsRow> stats_table(const Cover& asn_cover,
                                  const std::vector<std::string>& node_ids,
                                  const std::map<std::string, std::vector<RunStats>>& runs) {
  if (asn_cover.node_count() != static_cast<int>(node_ids.size()))
    throw ContractError("stats_table: cover and node id list disagree");
  // algorithm-level means first
  std::map<std::string, RunStats> algo_mean;
  for (const auto& [id, records] : runs) {
    if (records.empty()) continue;
    RunStats m;
    for (const auto& r : records) {
      m.num_communities += r.num_communities;
      m.mean_size += r.mean_size;
      m.mean_density += r.mean_density;
      m.modularity += r.modularity;
      m.mean_conductance += r.mean_conductance;
      m.mean_ncut += r.mean_ncut;
    }
    double k = static_cast<double>(records.size());
    m.num_communities /= k;
    m.mean_size /= k;
    m.mean_density /= k;
    m.modularity /= k;
    m.mean_conductance /= k;
    m.mean_ncut /= k;
    algo_mean[id] = m;
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(asn_cover.community_count()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return asn_cover.communities()[a].size() > asn_cover.communities()[b].size();
  });

  std::vector<StatsRow> rows;
  int number = 1;
  for (std::size_t c : order) {
    const auto& comm = asn_cover.communities()[c];
    if (comm.empty()) throw ContractError("stats_table: empty ASN community");
    std::vector<double> nc, sz, dn, md, cd, nt;
    for (int v : comm) {
      const auto& id = node_ids[static_cast<std::size_t>(v)];
      auto it = algo_mean.find(id);
      if (it == algo_mean.end()) continue;  // algorithm with no ok runs
      nc.push_back(it->second.num_communities);
      sz.push_back(it->second.mean_size);
      dn.push_back(it->second.mean_density);
      md.push_back(it->second.modularity);
      cd.push_back(it->second.mean_conductance);
      nt.push_back(it->second.mean_ncut);
    }
    StatsRow row;
    row.community = number++;
    row.algorithms = static_cast<int>(nc.size());
    auto fill = [](const std::vector<double>& xs, double& mean, double& se) {
      auto ms = mean_se(xs);
      mean = ms.mean;
      se = ms.se;
    };
    fill(nc, row.num_communities, row.num_communities_se);
    fill(sz, row.mean_size, row.mean_size_se);
    fill(dn, row.density, row.density_se);
    fill(md, row.modularity, row.modularity_se);
    fill(cd, row.conductance, row.conductance_se);
    fill(nt, row.ncut, row.ncut_se);
    rows.push_back(row);
  }
  return rows;
}

std::vector<RankEntry> ground_truth_ranking(const AsnNet& gt_net) {
  int gt = gt_net.index_of(kGroundTruthId);
  if (gt < 0)
    throw ContractError("ground_truth_ranking: net has no '" + kGroundTruthId + "' node");
  std::vector<std::pair<double, std::string>> weighted;
  for (const auto& e : gt_net.edges()) {
    int other = -1;
    if (e.a == gt)
      other = e.b;
    else if (e.b == gt)
      other = e.a;
    else
      continue;
    if (e.weight > 0.0)
      weighted.emplace_back(e.weight, gt_net.nodes()[static_cast<std::size_t>(other)]);
  }
  std::sort(weighted.begin(), weighted.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<RankEntry> out;
  for (std::size_t i = 0; i < weighted.size(); ++i) {
    RankEntry entry;
    entry.rank = (i > 0 && weighted[i].first == weighted[i - 1].first)
                     ? out.back().rank
                     : static_cast<int>(i) + 1;
    entry.algorithm = weighted[i].second;
    entry.weight = weighted[i].first;
    out.push_back(std::move(entry));
  }
  return out;
}

namespace {

// Average path length over a subset, or nothing when a pair is disconnected.
std::optional<double> try_apl(const Graph& g, const std::vector<int>& nodes) {
  double total = 0.0;
  long long pairs = 0;
  std::vector<int> dist(static_cast<std::size_t>(g.node_count()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    std::fill(dist.begin(), dist.end(), -1);
    dist[static_cast<std::size_t>(nodes[i])] = 0;
    std::deque<int> queue{nodes[i]};
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
      if (d < 0) return std::nullopt;
      total += d;
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace

NullModelResult apl_null_model(const Graph& g, const std::vector<int>& nodeset,
                               int trials, std::uint64_t seed) {
  if (trials < 1) throw ValueError("apl_null_model: trials must be >= 1");
  if (static_cast<int>(nodeset.size()) > g.node_count())
    throw ValueError("apl_null_model: nodeset larger than the graph");
  if (nodeset.size() < 2) throw ValueError("apl_null_model: nodeset needs >= 2 nodes");

  NullModelResult res;
  res.trials = trials;
  res.seed = seed;
  res.observed = avg_path_length(g, &nodeset);

  int n = g.node_count();
  std::size_t size = nodeset.size();
  res.samples.reserve(static_cast<std::size_t>(trials));
  long long hits = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, "apl-trial", std::to_string(t)));
    std::optional<double> value;
    for (int attempt = 0; attempt < 100000 && !value; ++attempt) {
      // partial Fisher-Yates draw of `size` distinct nodes
      std::vector<int> ids(static_cast<std::size_t>(n));
      std::iota(ids.begin(), ids.end(), 0);
      for (std::size_t i = 0; i < size; ++i) {
        std::size_t j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(n) - 1));
        std::swap(ids[i], ids[j]);
      }
      std::vector<int> pick(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(size));
      value = try_apl(g, pick);
      if (!value) ++res.resamples;
    }
    if (!value)
      throw ValueError("apl_null_model: could not sample a connected subset");
    res.samples.push_back(*value);
    if (*value <= res.observed) ++hits;
  }
  res.p_value = static_cast<double>(hits) / static_cast<double>(trials);
  return res;
}

std::vector<std::pair<double, double>> ccdf(std::vector<double> weights) {
  if (weights.empty()) throw ValueError("ccdf: no weights");
  std::sort(weights.begin(), weights.end());
  std::vector<std::pair<double, double>> points;
  double total = static_cast<double>(weights.size());
  std::size_t i = 0;
  while (i < weights.size()) {
    double w = weights[i];
    // all weights >= w are those at positions i..end
    points.emplace_back(w, (total - static_cast<double>(i)) / total);
    while (i < weights.size() && weights[i] == w) ++i;
  }
  return points;
}

double weight_correlation(const AsnNet& a, const AsnNet& b) {
  if (a.nodes() != b.nodes())
    throw ContractError("weight_correlation: nets are over different node sets");
  std::map<std::pair<int, int>, std::pair<double, double>> pairs;
  for (const auto& e : a.edges())
    if (e.weight > 0.0) pairs[{e.a, e.b}].first = e.weight;
  for (const auto& e : b.edges())
    if (e.weight > 0.0) pairs[{e.a, e.b}].second = e.weight;
  if (pairs.size() < 2) throw ValueError("weight_correlation: fewer than 2 weighted pairs");
  double mx = 0.0, my = 0.0;
  for (const auto& [k, v] : pairs) {
    mx += v.first;
    my += v.second;
  }
  double count = static_cast<double>(pairs.size());
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (const auto& [k, v] : pairs) {
    double dx = v.first - mx, dy = v.second - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0)
    throw ValueError("weight_correlation: degenerate (constant) weights");
  return sxy / std::sqrt(sxx * syy);
}

double partition_agreement(const Cover& a, const Cover& b) {
  return onmi(a, b, OnmiVariant::MAX);
}

}  // namespace asnkit
