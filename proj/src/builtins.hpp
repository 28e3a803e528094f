#pragma once

// Internal declarations for the built-in detectors. Each returns a total
// Cover and is deterministic in (graph, params, seed).

#include <cstdint>

#include "asnkit/algorithms.hpp"
#include "asnkit/graph.hpp"

namespace asnkit::detail {

Cover labelprop(const Graph& g, std::uint64_t seed);
Cover slpa(const Graph& g, double r, std::uint64_t seed);
Cover louvain(const Graph& g, std::uint64_t seed);
Cover cnm(const Graph& g);
Cover girvan_newman(const Graph& g);
Cover walktrap(const Graph& g, int t);
Cover kclique(const Graph& g, int k);
Cover hlc(const Graph& g);
Cover nsim_aggl(const Graph& g, int cut);
Cover infomap_2l(const Graph& g, std::uint64_t seed);

}  // namespace asnkit::detail
