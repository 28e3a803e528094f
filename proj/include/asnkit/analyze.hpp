#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asnkit/algorithms.hpp"
#include "asnkit/asn.hpp"
#include "asnkit/graph.hpp"
#include "asnkit/metrics.hpp"

namespace asnkit {

struct ClusterResult {
  Cover cover;  // over ASN node indices
  double codelength_one_module = 0.0;
  std::optional<double> codelength_clustered;  // absent for an overlapping clustering
};

/// Clusters the weighted ASN with a registry clusterer (a builtin id;
/// default infomap_2l) and reports the map-equation codelength before
/// (one module) and after. Disconnected nets cluster per component.
ClusterResult cluster_asn(const AsnNet& net, const std::string& clusterer_id,
                          std::uint64_t seed);

struct FeatureRow {
  int community = 0;  // 1-based, largest community first
  int size = 0;
  double over = 0.0, spr = 0.0, q = 0.0, nsim = 0.0;
};

/// Per ASN community: node count and the fraction of members carrying each
/// category flag. Overlap nodes count in all of their communities.
/// Throws ValueError when a node has no metadata row.
std::vector<FeatureRow> feature_table(const Cover& asn_cover,
                                      const std::vector<std::string>& node_ids,
                                      const std::map<std::string, AlgorithmFlags>& metadata);

struct RunStats {
  double num_communities = 0.0;
  double mean_size = 0.0;
  double mean_density = 0.0;
  double modularity = 0.0;  // Lazar form when the algorithm is overlapping
  double mean_conductance = 0.0;
  double mean_ncut = 0.0;
};

/// Descriptive statistics of one detector output on one benchmark.
RunStats run_statistics(const Graph& g, const Cover& cover, bool overlapping_algorithm);

struct StatsRow {
  int community = 0;
  int algorithms = 0;
  double num_communities = 0.0, num_communities_se = 0.0;
  double mean_size = 0.0, mean_size_se = 0.0;
  double density = 0.0, density_se = 0.0;
  double modularity = 0.0, modularity_se = 0.0;
  double conductance = 0.0, conductance_se = 0.0;
  double ncut = 0.0, ncut_se = 0.0;
};

/// Per-run statistics averaged per algorithm, then per ASN community, with
/// standard errors over the member algorithms.
std::vector<StatsRow> stats_table(const Cover& asn_cover,
                                  const std::vector<std::string>& node_ids,
                                  const std::map<std::string, std::vector<RunStats>>& runs);

struct RankEntry {
  int rank = 0;  // competition ranking; ties share a rank
  std::string algorithm;
  double weight = 0.0;
};

/// Algorithms by descending edge weight to the ground-truth pseudo-node;
/// zero-weight algorithms are omitted. Throws ContractError when the net has
/// no ground-truth node.
std::vector<RankEntry> ground_truth_ranking(const AsnNet& gt_net);

struct NullModelResult {
  double observed = 0.0;
  std::vector<double> samples;
  double p_value = 0.0;  // (# samples <= observed) / trials
  int trials = 0;
  std::uint64_t seed = 0;
  long long resamples = 0;  // subsets redrawn due to disconnected pairs
};

/// Observed average path length of `nodeset` against uniformly resampled
/// node subsets of the same size. Per-trial seeds derive from (seed, trial),
/// so results do not depend on scheduling.
NullModelResult apl_null_model(const Graph& g, const std::vector<int>& nodeset,
                               int trials, std::uint64_t seed);

/// Points (w, P(W >= w)) at each distinct weight, ascending in w.
std::vector<std::pair<double, double>> ccdf(std::vector<double> weights);

/// Pearson correlation of edge weights over the union of weighted pairs
/// (zero-filled where one net lacks the pair). Node sets must match.
double weight_correlation(const AsnNet& a, const AsnNet& b);

/// Agreement of two clusterings of the same universe: onmi MAX.
double partition_agreement(const Cover& a, const Cover& b);

}  // namespace asnkit
