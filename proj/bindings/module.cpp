// Python bindings for the core operations.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "asnkit/algorithms.hpp"
#include "asnkit/analyze.hpp"
#include "asnkit/asn.hpp"
#include "asnkit/graph.hpp"
#include "asnkit/lfr.hpp"
#include "asnkit/metrics.hpp"
#include "asnkit/pipeline.hpp"

namespace py = pybind11;
using namespace asnkit;

namespace {

OnmiVariant variant_arg(const std::string& v) { return onmi_variant_from_string(v); }

SimilarityMatrix matrix_arg(const std::vector<std::string>& ids,
                            const std::vector<std::vector<double>>& sim) {
  SimilarityMatrix m;
  m.ids = ids;
  m.sim = sim;
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Community-detection output similarity toolkit";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValueError>(m, "ValueError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<GenerationError>(m, "GenerationError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<Graph>(m, "Graph")
      .def(py::init([](int n, const std::vector<std::tuple<int, int, double>>& edges) {
             std::vector<Edge> es;
             es.reserve(edges.size());
             for (auto [u, v, w] : edges) es.push_back({u, v, w});
             return Graph(n, std::move(es), true);
           }),
           py::arg("n"), py::arg("weighted_edges"))
      .def_static(
          "from_pairs",
          [](int n, const std::vector<std::pair<int, int>>& pairs) {
            return Graph::from_pairs(n, pairs);
          },
          py::arg("n"), py::arg("pairs"))
      .def_property_readonly("n", &Graph::node_count)
      .def_property_readonly("m", &Graph::edge_count)
      .def_property_readonly("weighted", &Graph::weighted)
      .def("degree", &Graph::degree)
      .def("strength", &Graph::strength)
      .def("total_weight", &Graph::total_weight)
      .def("has_edge", &Graph::has_edge)
      .def("edge_weight", &Graph::edge_weight)
      .def("edges",
           [](const Graph& g) {
             std::vector<std::tuple<int, int, double>> out;
             for (const auto& e : g.edges()) out.emplace_back(e.u, e.v, e.w);
             return out;
           })
      .def("__repr__", [](const Graph& g) {
        std::ostringstream ss;
        ss << "Graph(n=" << g.node_count() << ", m=" << g.edge_count() << ")";
        return ss.str();
      });

  py::class_<Cover>(m, "Cover")
      .def(py::init<int, std::vector<std::vector<int>>>(), py::arg("n"), py::arg("communities"))
      .def_static("singletons", &Cover::singletons)
      .def_static("with_singleton_completion", &Cover::with_singleton_completion, py::arg("n"),
                  py::arg("communities"))
      .def_property_readonly("n", &Cover::node_count)
      .def_property_readonly("communities", &Cover::communities)
      .def("membership_counts", &Cover::membership_counts)
      .def("is_partition", &Cover::is_partition)
      .def("__eq__", [](const Cover& a, const Cover& b) { return a == b; })
      .def("__len__", &Cover::community_count)
      .def("__repr__", [](const Cover& c) {
        std::ostringstream ss;
        ss << "Cover(n=" << c.node_count() << ", communities=" << c.community_count() << ")";
        return ss.str();
      });

  m.def(
      "load_graph",
      [](const std::string& text, bool symmetrize) {
        auto lg = load_graph_string(text, symmetrize);
        return py::make_tuple(lg.graph, lg.ids.labels);
      },
      py::arg("text"), py::arg("symmetrize") = false,
      "Parse an edge list; returns (graph, labels).");
  m.def("write_graph", &write_graph_string);
  m.def("graph_digest", &graph_digest);
  m.def("load_cover", &load_cover_string, py::arg("text"), py::arg("n"));
  m.def("write_cover", &write_cover_string);

  // metrics
  m.def(
      "onmi",
      [](const Cover& x, const Cover& y, const std::string& variant) {
        return onmi(x, y, variant_arg(variant));
      },
      py::arg("x"), py::arg("y"), py::arg("variant") = "MAX");
  m.def("modularity", &modularity);
  m.def("lazar_modularity", &lazar_modularity);
  m.def("conductance", &conductance);
  m.def("ncut", &ncut);
  m.def("density", &community_density);
  m.def("map_codelength", &map_codelength);
  m.def("transitivity", &transitivity);
  m.def(
      "avg_path_length",
      [](const Graph& g, const std::optional<std::vector<int>>& subset) {
        return subset ? avg_path_length(g, &*subset) : avg_path_length(g);
      },
      py::arg("graph"), py::arg("subset") = std::nullopt);

  // lfr
  py::class_<LfrParams>(m, "LfrParams")
      .def(py::init<>())
      .def_readwrite("n", &LfrParams::n)
      .def_readwrite("mu", &LfrParams::mu)
      .def_readwrite("k_avg", &LfrParams::k_avg)
      .def_readwrite("k_max", &LfrParams::k_max)
      .def_readwrite("tau1", &LfrParams::tau1)
      .def_readwrite("tau2", &LfrParams::tau2)
      .def_readwrite("c_min", &LfrParams::c_min)
      .def_readwrite("c_max", &LfrParams::c_max)
      .def_readwrite("o_n", &LfrParams::o_n)
      .def_readwrite("o_m", &LfrParams::o_m)
      .def_readwrite("seed", &LfrParams::seed);
  m.def("lfr_desk_params", &lfr_desk_params, py::arg("n"), py::arg("mu"),
        py::arg("overlapping") = false, py::arg("seed") = 0);
  m.def(
      "generate_lfr",
      [](const LfrParams& p) {
        LfrResult r = generate_lfr(p);
        return py::make_tuple(r.graph, r.ground_truth, r.realized_mu, r.realized_mean_degree);
      },
      "Returns (graph, ground_truth, realized_mu, realized_mean_degree).");
  m.def("sample_truncated_powerlaw", &sample_truncated_powerlaw, py::arg("exponent"),
        py::arg("x_min"), py::arg("x_max"), py::arg("count"), py::arg("seed"));

  // algorithms
  m.def("builtin_catalog", [] { return builtin_catalog(); });
  m.def(
      "run_builtin",
      [](const std::string& id, const Graph& g, const Params& params, std::uint64_t seed) {
        return run_builtin(id, g, params, seed);
      },
      py::arg("id"), py::arg("graph"), py::arg("params") = Params{}, py::arg("seed") = 0);
  m.def(
      "grid_search",
      [](const std::string& id, const Graph& g, const ParamGrid& grid, std::uint64_t seed) {
        AlgorithmSpec spec;
        spec.id = id;
        spec.kind = AlgoKind::Builtin;
        spec.param_grid = grid;
        RunRecord rec = grid_search(spec, g, seed);
        if (rec.status != RunStatus::Ok) throw ValueError("grid search failed: " + rec.message);
        return py::make_tuple(rec.params, *rec.cover, rec.score);
      },
      py::arg("id"), py::arg("graph"), py::arg("grid") = ParamGrid{}, py::arg("seed") = 0,
      "Returns (params, cover, score); the score is modularity (Lazar form for "
      "overlapping covers).");

  // asn
  py::class_<AsnNet>(m, "AsnNet")
      .def_property_readonly("nodes", &AsnNet::nodes)
      .def_property_readonly("delta", &AsnNet::delta)
      .def_property_readonly("scored", &AsnNet::scored)
      .def("weight", &AsnNet::weight)
      .def("min_degree", &AsnNet::min_degree)
      .def("edges",
           [](const AsnNet& net) {
             std::vector<std::tuple<std::string, std::string, double, double>> out;
             for (const auto& e : net.edges())
               out.emplace_back(net.nodes()[static_cast<std::size_t>(e.a)],
                                net.nodes()[static_cast<std::size_t>(e.b)], e.weight, e.score);
             return out;
           })
      .def("to_graph", &AsnNet::to_graph)
      .def("__repr__", [](const AsnNet& n) {
        std::ostringstream ss;
        ss << "AsnNet(nodes=" << n.nodes().size() << ", edges=" << n.edges().size() << ")";
        return ss.str();
      });

  m.def(
      "mutual_topk",
      [](const std::vector<std::string>& ids, const std::vector<std::vector<double>>& sim,
         int k) {
        auto pairs = mutual_topk(matrix_arg(ids, sim), k);
        std::vector<std::pair<std::string, std::string>> out;
        for (auto [i, j] : pairs)
          out.emplace_back(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
        return out;
      },
      py::arg("ids"), py::arg("sim"), py::arg("k") = 5);

  auto store_arg =
      [](const std::map<std::string,
                        std::pair<std::vector<std::string>, std::vector<std::vector<double>>>>&
             stores) {
        SimilarityStore store;
        for (const auto& [net, pair] : stores)
          store[net] = matrix_arg(pair.first, pair.second);
        return store;
      };
  m.def(
      "accumulate",
      [store_arg](const std::map<std::string, std::pair<std::vector<std::string>,
                                                        std::vector<std::vector<double>>>>& stores,
                  int k, bool include_ground_truth) {
        AccumulateOptions opts;
        opts.k = k;
        opts.include_ground_truth = include_ground_truth;
        return accumulate(store_arg(stores), opts);
      },
      py::arg("stores"), py::arg("k") = 5, py::arg("include_ground_truth") = false,
      "stores: {network_id: (ids, matrix)}");
  m.def(
      "aggregate_average",
      [store_arg](const std::map<std::string, std::pair<std::vector<std::string>,
                                                        std::vector<std::vector<double>>>>& s) {
        return aggregate_average(store_arg(s));
      });
  m.def(
      "aggregate_threshold",
      [store_arg](const std::map<std::string, std::pair<std::vector<std::string>,
                                                        std::vector<std::vector<double>>>>& s,
                  double tau) { return aggregate_threshold(store_arg(s), tau); },
      py::arg("stores"), py::arg("tau"));
  m.def(
      "sub_asn",
      [store_arg](const std::map<std::string, std::pair<std::vector<std::string>,
                                                        std::vector<std::vector<double>>>>& s,
                  const std::set<std::string>& subset, int k) {
        return sub_asn(store_arg(s), subset, k);
      },
      py::arg("stores"), py::arg("subset"), py::arg("k") = 5);
  m.def("nc_score", &nc_score);
  m.def("select_delta", &select_delta);
  m.def(
      "backbone",
      [](const AsnNet& net, double delta) {
        bool warn = false;
        AsnNet out = backbone(net, delta, &warn);
        return py::make_tuple(out, warn);
      },
      py::arg("net"), py::arg("delta"), "Returns (net, isolated_warning).");

  // analysis
  m.def(
      "cluster_asn",
      [](const AsnNet& net, const std::string& clusterer, std::uint64_t seed) {
        ClusterResult r = cluster_asn(net, clusterer, seed);
        return py::make_tuple(r.cover, r.codelength_one_module, r.codelength_clustered);
      },
      py::arg("net"), py::arg("clusterer") = "infomap_2l", py::arg("seed") = 0);
  m.def("ccdf", [](std::vector<double> w) { return ccdf(std::move(w)); });
  m.def("weight_correlation", &weight_correlation);
  m.def("partition_agreement", &partition_agreement);
  m.def(
      "apl_null_model",
      [](const Graph& g, const std::vector<int>& nodeset, int trials, std::uint64_t seed) {
        NullModelResult r = apl_null_model(g, nodeset, trials, seed);
        py::dict out;
        out["observed"] = r.observed;
        out["p_value"] = r.p_value;
        out["trials"] = r.trials;
        out["samples"] = r.samples;
        out["resamples"] = r.resamples;
        return out;
      },
      py::arg("graph"), py::arg("nodeset"), py::arg("trials") = 1000, py::arg("seed") = 0);

  // pipeline
  m.def("cache_key", &cache_key);
  m.def(
      "run_pipeline",
      [](const std::optional<std::string>& config_path,
         const std::optional<std::string>& out_dir, int workers,
         const std::optional<std::uint64_t>& seed) {
        std::optional<std::filesystem::path> ini;
        if (config_path) ini = *config_path;
        PipelineConfig cfg = load_config(ini);
        if (out_dir) cfg.out_dir = *out_dir;
        if (workers > 0) cfg.workers = workers;
        if (seed) cfg.seed = *seed;
        return run_pipeline(cfg).string();
      },
      py::arg("config") = std::nullopt, py::arg("out_dir") = std::nullopt,
      py::arg("workers") = -1, py::arg("seed") = std::nullopt);

  m.attr("__version__") = "0.1.0";
}
