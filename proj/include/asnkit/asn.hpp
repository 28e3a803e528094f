#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "asnkit/graph.hpp"

namespace asnkit {

/// Reserved id for the planted-cover pseudo-algorithm row.
inline const std::string kGroundTruthId = "ground_truth";

// Symmetric per-benchmark similarity matrix over the algorithms that
// produced a cover on that benchmark (diagonal 1).
struct SimilarityMatrix {
  std::vector<std::string> ids;          // sorted
  std::vector<std::vector<double>> sim;  // sim[i][j] == sim[j][i], diag 1

  int index_of(const std::string& id) const;  // -1 when absent
  void validate() const;
};

/// network id -> matrix (ordered for deterministic iteration).
using SimilarityStore = std::map<std::string, SimilarityMatrix>;

struct AsnEdge {
  int a = 0;  // a < b, indices into nodes
  int b = 0;
  double weight = 0.0;
  double score = 0.0;  // NC significance, meaningful when scored() on the net
};

// Weighted network over algorithm ids with optional per-edge noise-corrected
// significance scores; the artifact's central output.
class AsnNet {
 public:
  AsnNet() = default;
  AsnNet(std::vector<std::string> nodes, std::vector<AsnEdge> edges);

  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::vector<AsnEdge>& edges() const { return edges_; }
  bool scored() const { return scored_; }
  std::optional<double> delta() const { return delta_; }

  int index_of(const std::string& id) const;  // -1 when absent
  double weight(const std::string& a, const std::string& b) const;  // 0 when absent
  int min_degree() const;  // over nodes, counting stored edges

  /// Weighted Graph over node indices (for clustering / path metrics).
  Graph to_graph() const;

  void set_scored(bool s) { scored_ = s; }
  void set_delta(double d) { delta_ = d; }
  std::vector<AsnEdge>& mutable_edges() { return edges_; }

 private:
  std::vector<std::string> nodes_;  // sorted, unique
  std::vector<AsnEdge> edges_;      // sorted by (a, b)
  bool scored_ = false;
  std::optional<double> delta_;
};

/// Pairs (i, j) that are mutually within each other's k most similar peers;
/// ties at the k-th rank admit every tied peer.
std::set<std::pair<int, int>> mutual_topk(const SimilarityMatrix& m, int k = 5);

struct AccumulateOptions {
  int k = 5;
  bool include_ground_truth = false;       // keep the ground_truth pseudo-row
  const std::set<std::string>* restrict_to = nullptr;  // sub-ASN node subset
};

/// weight(a, b) = number of benchmarks whose mutual top-k contains the pair.
AsnNet accumulate(const SimilarityStore& stores, const AccumulateOptions& opts = {});

/// weight(a, b) = mean similarity across benchmarks where both ran.
AsnNet aggregate_average(const SimilarityStore& stores);

/// weight(a, b) = number of benchmarks with similarity strictly above tau.
AsnNet aggregate_threshold(const SimilarityStore& stores, double tau);

/// Hypergeometric noise-correction scores:
/// E[w] = s_a s_b / T*, Var[w] = E (1 - s_a/T*) (T* - s_b) / (T* - 1),
/// score = (w - E) / sqrt(Var + 1).
AsnNet nc_score(const AsnNet& net);

/// Largest threshold that keeps every node attached: min over nodes of the
/// maximum incident score. Throws ContractError on an isolated node.
double select_delta(const AsnNet& scored);

/// Keeps edges with score >= delta. When that isolates a node the operation
/// still succeeds and reports through isolated_warning.
AsnNet backbone(const AsnNet& scored, double delta, bool* isolated_warning = nullptr);

/// Re-runs ranking and accumulation restricted to an algorithm subset, then
/// scores the result. Distinct from inducing the full ASN on the subset.
AsnNet sub_asn(const SimilarityStore& stores, const std::set<std::string>& subset, int k = 5);

/// CSV: header "src_id,dst_id,weight,nc_score"; rows sorted by ids.
void write_asn_csv(const AsnNet& net, std::ostream& out);
AsnNet read_asn_csv(std::istream& in);

/// CSV with a leading id column and one column per algorithm.
void write_matrix_csv(const SimilarityMatrix& m, std::ostream& out);
SimilarityMatrix read_matrix_csv(std::istream& in);

}  // namespace asnkit
