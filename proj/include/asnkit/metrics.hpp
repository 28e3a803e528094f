#pragma once

#include <optional>
#include <string>
#include <vector>

#include "asnkit/graph.hpp"

namespace asnkit {

enum class OnmiVariant { MAX, LFK, SUM };

OnmiVariant onmi_variant_from_string(const std::string& s);
std::string to_string(OnmiVariant v);

/// Overlapping normalized mutual information between two covers on the same
/// node set. Each community is treated as a binary indicator variable; the
/// conditional entropy of a community given the other cover is the minimum
/// over admissible counterpart communities (the LFK anti-complement guard).
/// MAX normalizes mutual information by the larger cover entropy, SUM by the
/// mean, LFK averages normalized conditional entropies per community.
double onmi(const Cover& x, const Cover& y, OnmiVariant variant);

/// Newman modularity of a disjoint exhaustive partition. Weighted graphs use
/// edge weights. Throws ContractError on an overlapping cover (use
/// lazar_modularity for covers).
double modularity(const Graph& g, const Cover& partition);

/// Overlapping modularity: per-community mean of membership-normalized
/// (in-degree minus out-degree) node terms times the community density.
/// Communities of size 1 contribute 0; nodes of degree 0 contribute 0.
double lazar_modularity(const Graph& g, const Cover& cover);

/// c_S / (2 m_S + c_S); 0 when the community has no incident edges.
double conductance(const Graph& g, const std::vector<int>& community);

/// conductance plus the complementary term c_S / (2 (m - m_S) + c_S).
double ncut(const Graph& g, const std::vector<int>& community);

/// 2 m_S / (|S| (|S|-1)); singleton communities count as 1.
double community_density(const Graph& g, const std::vector<int>& community);

/// Two-level map-equation codelength, in bits per random-walk step.
/// Stationary visit rates come from weighted degrees. Throws ValueError on an
/// edgeless graph; requires a disjoint exhaustive partition.
double map_codelength(const Graph& g, const Cover& partition);

/// 3 * triangles / connected triples; 0 when there are no triples.
double transitivity(const Graph& g);

/// Mean unweighted shortest-path length over all pairs of `subset` (all node
/// pairs when absent). Throws ValueError naming the first disconnected pair.
double avg_path_length(const Graph& g, const std::vector<int>* subset = nullptr);

/// Internal edges, boundary edges of a community (unweighted counts).
struct CommunityCut {
  long long internal = 0;
  long long boundary = 0;
};
CommunityCut community_cut(const Graph& g, const std::vector<int>& community);

}  // namespace asnkit
