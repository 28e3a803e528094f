#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "asnkit/error.hpp"

namespace asnkit {

struct Edge {
  int u = 0;  // u < v always
  int v = 0;
  double w = 1.0;
};

// Undirected simple graph over dense node ids 0..n-1. Immutable after
// construction; safe to share across threads.
class Graph {
 public:
  Graph() = default;

  /// Validates: no self-loops, no duplicate pairs, ids in range, weights > 0.
  Graph(int n, std::vector<Edge> edges, bool weighted);

  /// Unweighted convenience constructor.
  static Graph from_pairs(int n, const std::vector<std::pair<int, int>>& pairs);

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  bool weighted() const { return weighted_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Sum of edge weights (== edge count when unweighted).
  double total_weight() const { return total_weight_; }

  int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }
  double strength(int v) const { return strength_[static_cast<std::size_t>(v)]; }

  /// Neighbors of v with edge weights, ascending by neighbor id.
  const std::vector<std::pair<int, double>>& neighbors(int v) const {
    return adj_[static_cast<std::size_t>(v)];
  }

  bool has_edge(int u, int v) const;
  double edge_weight(int u, int v) const;  // 0 when absent

 private:
  int n_ = 0;
  bool weighted_ = false;
  double total_weight_ = 0.0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
  std::vector<double> strength_;
  std::unordered_set<std::uint64_t> edge_keys_;
};

// A set of node communities, possibly overlapping. A Partition is a Cover
// that is disjoint and exhaustive. Canonical form: members ascending within
// a community, communities in lexicographic order. Immutable.
class Cover {
 public:
  Cover() = default;

  /// Validates: communities non-empty, ids in [0,n), every node covered.
  /// Duplicate ids within a community are collapsed.
  Cover(int n, std::vector<std::vector<int>> communities);

  /// Nodes in no community become singletons before validation.
  static Cover with_singleton_completion(int n, std::vector<std::vector<int>> communities);

  static Cover singletons(int n);

  int node_count() const { return n_; }
  int community_count() const { return static_cast<int>(comms_.size()); }
  const std::vector<std::vector<int>>& communities() const { return comms_; }

  /// s_i = number of communities containing node i (>= 1).
  std::vector<int> membership_counts() const;

  /// Pairwise disjoint and sizes sum to n.
  bool is_partition() const;

  bool operator==(const Cover& other) const {
    return n_ == other.n_ && comms_ == other.comms_;
  }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> comms_;
};

// Mapping between original edge-list labels and dense ids (appearance order).
struct IdMap {
  std::vector<std::string> labels;  // dense id -> original label

  bool trivial() const;  // labels are exactly "0".."n-1"
};

struct LoadedGraph {
  Graph graph;
  IdMap ids;
};

/// Parses a whitespace-separated edge list, one edge per line, optional third
/// weight column, '#'-prefixed lines ignored. A "# nodes N" comment (written
/// by write_graph) pins the node count and requires integer ids < N; without
/// it, labels are remapped to dense ids in order of first appearance.
/// Duplicate edges collapse with weights summed. A reversed duplicate is
/// rejected unless symmetrize is set.
LoadedGraph load_graph(std::istream& in, bool symmetrize = false);
LoadedGraph load_graph_string(const std::string& text, bool symmetrize = false);
LoadedGraph load_graph_file(const std::filesystem::path& path, bool symmetrize = false);

/// Canonical serialization: "# nodes N" header, then "u v [w]" lines with
/// u < v, sorted. load_graph(write_graph(g)) == g.
void write_graph(const Graph& g, std::ostream& out);
std::string write_graph_string(const Graph& g);
void write_graph_file(const Graph& g, const std::filesystem::path& path);

/// SHA-256 of the canonical serialization.
std::string graph_digest(const Graph& g);

/// One community per line, space-separated node ids. Uncovered nodes are
/// appended as singletons; duplicate ids within a line collapse.
Cover load_cover(std::istream& in, int n);
Cover load_cover_string(const std::string& text, int n);
Cover load_cover_file(const std::filesystem::path& path, int n);

void write_cover(const Cover& c, std::ostream& out);
std::string write_cover_string(const Cover& c);
void write_cover_file(const Cover& c, const std::filesystem::path& path);

/// Two-column sidecar: original label, dense id.
void write_id_map(const IdMap& ids, std::ostream& out);
void write_id_map_file(const IdMap& ids, const std::filesystem::path& path);
IdMap load_id_map(std::istream& in);

/// Canonical text for a double: integers print without a decimal point,
/// anything else round-trips exactly. Used by every CSV writer so outputs
/// are byte-stable.
std::string format_double(double v);

}  // namespace asnkit
