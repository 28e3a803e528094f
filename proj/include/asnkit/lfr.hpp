#pragma once

#include <cstdint>
#include <vector>

#include "asnkit/graph.hpp"

namespace asnkit {

struct LfrParams {
  int n = 0;
  double mu = 0.0;     // mixing parameter, fraction of boundary edge endpoints
  double k_avg = 6.0;  // target mean degree
  int k_max = 0;
  double tau1 = 2.0;   // degree exponent
  double tau2 = 1.0;   // community-size exponent
  int c_min = 0;
  int c_max = 0;
  int o_n = 0;   // overlapping nodes
  int o_m = 1;   // memberships per overlapping node
  std::uint64_t seed = 0;

  void validate() const;  // throws ValueError
};

/// Parameter fill-in for the benchmark grid: k_max = max(ceil(n/5), 2 k_avg),
/// c_min = 5, c_max = ceil(n/4); overlapping mode sets o_n = ceil(n/10),
/// o_m = 2.
LfrParams lfr_desk_params(int n, double mu, bool overlapping, std::uint64_t seed);

struct LfrResult {
  Graph graph;
  Cover ground_truth;
  double realized_mu = 0.0;           // boundary-edge endpoint fraction
  double realized_mean_degree = 0.0;  // 2m / n
  int restarts = 0;
};

/// i.i.d. integers on [x_min, x_max] with p(x) proportional to x^-exponent.
std::vector<int> sample_truncated_powerlaw(double exponent, int x_min, int x_max,
                                           int count, std::uint64_t seed);

/// Analytic mean of the truncated discrete power law (test oracle aid).
double truncated_powerlaw_mean(double exponent, int x_min, int x_max);

/// Generates a benchmark graph with a planted community cover:
/// power-law degrees (lower cutoff solved so the expected mean degree is
/// k_avg), power-law community sizes, membership assignment respecting
/// per-community internal-degree bounds, per-community and global
/// configuration-model wiring, and degree-preserving rewiring until the
/// graph is simple and every inter-community edge crosses a real boundary.
/// Throws GenerationError naming the violated constraint after the retry
/// budget (100 restarts) is exhausted.
LfrResult generate_lfr(const LfrParams& params);

}  // namespace asnkit
