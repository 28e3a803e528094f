#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "asnkit/algorithms.hpp"
#include "asnkit/analyze.hpp"
#include "asnkit/asn.hpp"
#include "asnkit/graph.hpp"
#include "asnkit/metrics.hpp"

namespace asnkit {

struct BenchGridConfig {
  std::vector<int> n_list = {50, 100};
  std::vector<double> mu_list = {0.07, 0.15, 0.21};
  int repeats = 5;
  bool disjoint = true;
  bool overlapping = true;
};

struct PipelineConfig {
  BenchGridConfig bench;
  std::string real_dir;          // optional directory of edge-list files
  bool real_symmetrize = false;  // fold reversed duplicates when ingesting
  std::string registry_path;     // empty: the built-in desk registry
  OnmiVariant variant = OnmiVariant::MAX;
  int k = 5;
  bool delta_auto = true;
  double delta_fixed = 0.0;
  double tau = 0.5;  // threshold-aggregation robustness variant
  std::string clusterer = "infomap_2l";
  int null_trials = 1000;
  int cache_audit = 20;  // warm-cache entries re-checked per run
  std::filesystem::path out_dir = "out";
  int workers = 1;
  std::uint64_t seed = 42;

  void validate() const;  // throws ConfigError
};

/// Flat INI (section/key=value) with ASNKIT_<SECTION>_<KEY> environment
/// overrides applied on top.
PipelineConfig load_config(const std::optional<std::filesystem::path>& ini_path);

/// Stable hex digest for run caching; identical inputs give identical keys
/// across runs and machines. Parameter canonicalization is the caller's
/// concern (canonical_params below).
std::string cache_key(const std::string& algorithm_id, const std::string& params_canonical,
                      const std::string& network_digest, std::uint64_t seed);

std::string canonical_params(const Params& params);
std::string canonical_params(const ParamGrid& grid);

struct NetworkRef {
  std::string id;
  std::filesystem::path edges_path;
  std::filesystem::path cover_path;  // empty when no ground truth
  bool synthetic = false;
  double realized_mu = 0.0;
  double realized_mean_degree = 0.0;
};

/// Deterministic worker pool: tasks may run in any order but must write only
/// to their own slots. Rethrows the first task exception.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

// Stages. Each writes its artifacts under config.out_dir and returns what the
// next stage consumes; stages re-entered from the CLI reload from disk.
std::vector<NetworkRef> stage_gen_bench(const PipelineConfig& config);
std::vector<NetworkRef> load_network_manifest(const PipelineConfig& config);

struct RunSummary {
  std::string network_id;
  std::string algorithm_id;
  RunStatus status = RunStatus::Failed;
  Params params;
  double score = 0.0;
  std::string message;
  std::filesystem::path cover_path;  // cache file, status Ok only
};

std::vector<RunSummary> stage_run(const PipelineConfig& config,
                                  const std::vector<NetworkRef>& networks,
                                  const Registry& registry);
std::vector<RunSummary> load_run_summaries(const PipelineConfig& config);

/// Similarity matrices for all three variants; returns the store of the
/// configured variant.
SimilarityStore stage_similarity(const PipelineConfig& config,
                                 const std::vector<NetworkRef>& networks,
                                 const std::vector<RunSummary>& runs);
SimilarityStore load_similarity(const PipelineConfig& config, OnmiVariant variant,
                                bool synthetic_only = false);

struct AsnArtifacts {
  AsnNet weighted;  // scored
  AsnNet backboned;
  double delta = 0.0;
};

/// Accumulates the weighted ASN and the edge-weight CCDF.
AsnNet stage_build_asn(const PipelineConfig& config, const SimilarityStore& store);

/// Scores the weighted ASN, picks delta (auto or fixed) and extracts the
/// backbone.
AsnArtifacts stage_backbone(const PipelineConfig& config);
AsnArtifacts load_asn(const PipelineConfig& config);

/// Ground-truth ranking over the synthetic benchmarks.
std::vector<RankEntry> stage_rank_gt(const PipelineConfig& config);

/// Clustering, feature/statistics tables, headline statistics, null model.
void stage_analyze(const PipelineConfig& config, const Registry& registry);

/// oNMI-variant weight correlations, LFR-vs-real correlations, and the
/// aggregation-option agreement scores.
void stage_robustness(const PipelineConfig& config);

/// All stages in order. Returns the artifact directory.
std::filesystem::path run_pipeline(const PipelineConfig& config);

/// The registry named by the config (desk default when unset).
Registry load_registry(const PipelineConfig& config);

}  // namespace asnkit
