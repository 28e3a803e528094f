#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asnkit/graph.hpp"

namespace asnkit {

struct AlgorithmFlags {
  bool overlapping = false;      // may place nodes in several communities
  bool spreading = false;        // centrality- or spreading-process based
  bool modularity_based = false; // maximizes modularity
  bool nsim = false;             // neighborhood-similarity based
};

enum class AlgoKind { Builtin, External };

using Params = std::map<std::string, double>;
using ParamGrid = std::map<std::string, std::vector<double>>;

struct AlgorithmSpec {
  std::string id;
  AlgoKind kind = AlgoKind::Builtin;
  ParamGrid param_grid;  // singleton {} means one run with no parameters
  AlgorithmFlags flags;
  std::string command_template;  // external only; {input} {output} {seed} and {param}
  double timeout_sec = 120.0;    // external only
};

enum class RunStatus { Ok, Failed, Timeout };

std::string to_string(RunStatus s);

struct RunRecord {
  std::string algorithm_id;
  std::string network_id;
  Params params;
  std::optional<Cover> cover;  // present iff status == Ok
  double score = 0.0;          // grid-search selection score
  double seconds = 0.0;
  RunStatus status = RunStatus::Failed;
  std::string message;
};

// Detector registry: builtin suite entries plus external-command adapters.
class Registry {
 public:
  const std::vector<AlgorithmSpec>& entries() const { return entries_; }
  const AlgorithmSpec& get(const std::string& id) const;
  bool contains(const std::string& id) const;
  void add(AlgorithmSpec spec);  // throws ValueError on duplicate id

  /// The default desk-scale suite: the ten built-ins with parameter-grid
  /// variants split into distinct entries, plus a ground-truth copy adapter.
  static Registry desk_default();

  /// TSV columns: id, kind, command_template, timeout, param_grid (JSON),
  /// overlapping, spreading, modularity_based, nsim.
  static Registry load_tsv(const std::filesystem::path& path);
  void save_tsv(const std::filesystem::path& path) const;

 private:
  std::vector<AlgorithmSpec> entries_;
  std::map<std::string, std::size_t> index_;
};

/// Names of the built-in detectors.
const std::vector<std::string>& builtin_catalog();

/// Registry ids map onto builtins by prefix: "walktrap_t2" dispatches to
/// "walktrap". Throws ValueError when no builtin matches.
std::string builtin_dispatch_name(const std::string& registry_id);

/// Runs one built-in detector. Deterministic in (graph, params, seed).
/// Throws ValueError for an unknown id or out-of-domain parameter.
Cover run_builtin(const std::string& id, const Graph& g, const Params& params,
                  std::uint64_t seed);

/// Runs an external command with {input}/{output}/{seed} substitution in a
/// work directory, enforcing the timeout. Never throws for command failures;
/// the outcome is reported through the RunRecord status.
RunRecord run_external(const AlgorithmSpec& spec, const Graph& g,
                       const std::filesystem::path& workdir, std::uint64_t seed,
                       const std::filesystem::path* ground_truth_sidecar = nullptr);

/// Runs the algorithm at every grid point and keeps the best-scoring cover:
/// Newman modularity when the result is a partition, Lazar overlapping
/// modularity otherwise. Ties go to the lexicographically smallest parameter
/// tuple. All points failing yields a Failed record.
RunRecord grid_search(const AlgorithmSpec& spec, const Graph& g, std::uint64_t seed,
                      const std::filesystem::path* workdir = nullptr,
                      const std::filesystem::path* ground_truth_sidecar = nullptr);

/// All parameter combinations of a grid in lexicographic order
/// (names sorted, values ascending).
std::vector<Params> enumerate_grid(const ParamGrid& grid);

/// Selection score used by grid_search (0 on an edgeless graph).
double selection_score(const Graph& g, const Cover& cover);

}  // namespace asnkit
