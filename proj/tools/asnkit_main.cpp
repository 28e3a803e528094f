// Command-line surface for the ASN toolkit: benchmark generation, detector
// sweeps, similarity matrices, ASN construction, backboning and analysis.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "asnkit/pipeline.hpp"

namespace {

using asnkit::PipelineConfig;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string registry;
  std::string variant;
  std::string delta;
  std::string real_dir;
  int workers = -1;
  long long seed = -1;
  int k = -1;
  int repeats = -1;
  double tau = -1.0;
  int null_trials = -1;
  std::string n_list;
  std::string mu_list;
  std::string modes;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", config_path, "INI config file (key=value sections)");
    cmd->add_option("-o,--out", out_dir, "artifact directory");
    cmd->add_option("--registry", registry, "registry TSV ('default' for the built-in suite)");
    cmd->add_option("--variant", variant, "oNMI variant: MAX, LFK or SUM");
    cmd->add_option("--delta", delta, "backbone threshold: 'auto' or a number");
    cmd->add_option("--real-dir", real_dir, "directory of real-world edge lists");
    cmd->add_option("--workers", workers, "worker pool size");
    cmd->add_option("--seed", seed, "master seed");
    cmd->add_option("-k,--topk", k, "mutual top-k rank cutoff");
    cmd->add_option("--repeats", repeats, "benchmarks per grid cell");
    cmd->add_option("--tau", tau, "threshold-aggregation cutoff");
    cmd->add_option("--null-trials", null_trials, "null-model trial count");
    cmd->add_option("--n", n_list, "comma-separated benchmark sizes");
    cmd->add_option("--mu", mu_list, "comma-separated mixing parameters");
    cmd->add_option("--modes", modes, "benchmark modes: disjoint,overlap");
  }

  PipelineConfig to_config() const {
    std::optional<std::filesystem::path> ini;
    if (!config_path.empty()) ini = config_path;
    PipelineConfig cfg = asnkit::load_config(ini);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!registry.empty()) cfg.registry_path = registry == "default" ? "" : registry;
    if (!variant.empty()) cfg.variant = asnkit::onmi_variant_from_string(variant);
    if (!delta.empty()) {
      if (delta == "auto") {
        cfg.delta_auto = true;
      } else {
        cfg.delta_auto = false;
        cfg.delta_fixed = std::stod(delta);
      }
    }
    if (!real_dir.empty()) cfg.real_dir = real_dir;
    if (workers > 0) cfg.workers = workers;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (k > 0) cfg.k = k;
    if (repeats > 0) cfg.bench.repeats = repeats;
    if (tau >= 0.0) cfg.tau = tau;
    if (null_trials > 0) cfg.null_trials = null_trials;
    auto parse_list_int = [](const std::string& s) {
      std::vector<int> out;
      std::istringstream ss(s);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
      return out;
    };
    auto parse_list_double = [](const std::string& s) {
      std::vector<double> out;
      std::istringstream ss(s);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
      return out;
    };
    if (!n_list.empty()) cfg.bench.n_list = parse_list_int(n_list);
    if (!mu_list.empty()) cfg.bench.mu_list = parse_list_double(mu_list);
    if (!modes.empty()) {
      cfg.bench.disjoint = modes.find("disjoint") != std::string::npos;
      cfg.bench.overlapping = modes.find("overlap") != std::string::npos;
    }
    cfg.validate();
    return cfg;
  }
};

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const asnkit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ParseError&) {
    throw;  // handled by CLI11
  } catch (const std::exception& e) {
    std::cerr << "stage failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asnkit: measure community-detection output similarity, build the "
               "algorithm similarity network, backbone it and characterize it"};
  app.require_subcommand(1);

  CommonFlags flags;
  int exit_code = 0;

  auto add = [&](const std::string& name, const std::string& help,
                 std::function<void(const PipelineConfig&)> body) {
    CLI::App* cmd = app.add_subcommand(name, help);
    flags.attach(cmd);
    cmd->callback([&flags, body, &exit_code] {
      exit_code = guarded([&] {
        PipelineConfig cfg = flags.to_config();
        body(cfg);
      });
    });
    return cmd;
  };

  add("gen-bench", "generate the LFR benchmark grid (and ingest real networks)",
      [](const PipelineConfig& cfg) {
        auto nets = asnkit::stage_gen_bench(cfg);
        std::cout << "generated " << nets.size() << " networks under "
                  << (cfg.out_dir / "benchmarks").string() << "\n";
      });

  add("run", "grid-search every registry algorithm on every network",
      [](const PipelineConfig& cfg) {
        auto networks = asnkit::load_network_manifest(cfg);
        auto registry = asnkit::load_registry(cfg);
        auto runs = asnkit::stage_run(cfg, networks, registry);
        long long ok = 0;
        for (const auto& r : runs) ok += r.status == asnkit::RunStatus::Ok;
        std::cout << ok << "/" << runs.size() << " runs ok\n";
      });

  add("similarity", "pairwise oNMI matrices per benchmark (all variants)",
      [](const PipelineConfig& cfg) {
        auto networks = asnkit::load_network_manifest(cfg);
        auto runs = asnkit::load_run_summaries(cfg);
        auto store = asnkit::stage_similarity(cfg, networks, runs);
        std::cout << "similarity matrices for " << store.size() << " networks\n";
      });

  add("build-asn", "accumulate mutual top-k counts into the weighted ASN",
      [](const PipelineConfig& cfg) {
        auto store = asnkit::load_similarity(cfg, cfg.variant);
        auto net = asnkit::stage_build_asn(cfg, store);
        std::cout << "ASN: " << net.nodes().size() << " nodes, " << net.edges().size()
                  << " weighted edges\n";
      });

  add("backbone", "noise-corrected scores, delta selection and edge filtering",
      [](const PipelineConfig& cfg) {
        auto art = asnkit::stage_backbone(cfg);
        std::cout << "delta " << art.delta << ": kept " << art.backboned.edges().size()
                  << " edges, min degree " << art.backboned.min_degree() << "\n";
      });

  add("rank-gt", "rank algorithms by similarity to the planted ground truth",
      [](const PipelineConfig& cfg) {
        auto ranking = asnkit::stage_rank_gt(cfg);
        std::cout << "ranked " << ranking.size() << " algorithms\n";
      });

  add("analyze", "cluster the ASN and emit the feature/statistics tables",
      [](const PipelineConfig& cfg) {
        auto registry = asnkit::load_registry(cfg);
        asnkit::stage_analyze(cfg, registry);
        std::cout << "analysis tables written under " << (cfg.out_dir / "analysis").string()
                  << "\n";
      });

  add("robustness", "variant correlations and aggregation-option agreement",
      [](const PipelineConfig& cfg) {
        asnkit::stage_robustness(cfg);
        std::cout << "robustness report written\n";
      });

  add("pipeline", "all stages end to end", [](const PipelineConfig& cfg) {
    auto dir = asnkit::run_pipeline(cfg);
    std::cout << "pipeline complete: " << dir.string() << "\n";
  });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
