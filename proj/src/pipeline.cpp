#include "asnkit/pipeline.hpp"
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "asnkit/analyze.hpp"
#include "asnkit/digest.hpp"
#include "asnkit/lfr.hpp"
#include "asnkit/rng.hpp"
#include "json.hpp"

namespace asnkit {

namespace fs = std::filesystem;
using nlohmann::json;

void PipelineConfig::validate() const {
  if (bench.repeats < 1) throw ConfigError("config: repeats must be >= 1");
  if (k < 1) throw ConfigError("config: k must be >= 1");
  if (workers < 1) throw ConfigError("config: workers must be >= 1");
  if (null_trials < 1) throw ConfigError("config: null_trials must be >= 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("config: tau must be in [0,1]");
  if (bench.n_list.empty() || bench.mu_list.empty())
    throw ConfigError("config: benchmark grid must not be empty");
  for (int n : bench.n_list)
    if (n < 10) throw ConfigError("config: benchmark n must be >= 10");
  for (double mu : bench.mu_list)
    if (!(mu > 0.0 && mu < 1.0)) throw ConfigError("config: mu must be in (0,1)");
  if (!bench.disjoint && !bench.overlapping && real_dir.empty())
    throw ConfigError("config: no benchmark modes and no real networks");
  if (out_dir.empty()) throw ConfigError("config: output dir must be set");
}

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream ss(text);
  while (std::getline(ss, token, ',')) {
    std::size_t a = token.find_first_not_of(" \t");
    std::size_t b = token.find_last_not_of(" \t");
    if (a == std::string::npos) continue;
    out.push_back(token.substr(a, b - a + 1));
  }
  return out;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

// section -> key -> value
using IniMap = std::map<std::string, std::map<std::string, std::string>>;

IniMap parse_ini(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  IniMap out;
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t a = line.find_first_not_of(" \t");
    if (a == std::string::npos) continue;
    if (line[a] == '#' || line[a] == ';') continue;
    if (line[a] == '[') {
      std::size_t close = line.find(']', a);
      if (close == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
      section = line.substr(a + 1, close - a - 1);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    auto trim = [](std::string s) {
      std::size_t x = s.find_first_not_of(" \t");
      std::size_t y = s.find_last_not_of(" \t");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    out[section][trim(key)] = trim(value);
  }
  return out;
}

void apply_env_overrides(IniMap& ini) {
  static const std::vector<std::pair<std::string, std::string>> keys = {
      {"bench", "n"},          {"bench", "mu"},        {"bench", "repeats"},
      {"bench", "modes"},      {"run", "registry"},    {"run", "workers"},
      {"run", "seed"},         {"run", "real_dir"},    {"run", "real_symmetrize"},
      {"run", "audit"},        {"similarity", "variant"}, {"asn", "k"},
      {"asn", "delta"},        {"asn", "tau"},         {"analysis", "clusterer"},
      {"analysis", "null_trials"}, {"output", "dir"},
  };
  for (const auto& [section, key] : keys) {
    std::string name = "ASNKIT_" + upper(section) + "_" + upper(key);
    if (const char* v = std::getenv(name.c_str())) ini[section][key] = v;
  }
}

bool parse_bool(const std::string& s) {
  return s == "1" || s == "true" || s == "yes" || s == "on";
}

}  // namespace

PipelineConfig load_config(const std::optional<fs::path>& ini_path) {
  IniMap ini;
  if (ini_path) ini = parse_ini(*ini_path);
  apply_env_overrides(ini);
  PipelineConfig cfg;
  auto get = [&](const std::string& s, const std::string& k) -> std::optional<std::string> {
    auto si = ini.find(s);
    if (si == ini.end()) return std::nullopt;
    auto ki = si->second.find(k);
    if (ki == si->second.end()) return std::nullopt;
    return ki->second;
  };
  try {
    if (auto v = get("bench", "n")) {
      cfg.bench.n_list.clear();
      for (const auto& t : split_list(*v)) cfg.bench.n_list.push_back(std::stoi(t));
    }
    if (auto v = get("bench", "mu")) {
      cfg.bench.mu_list.clear();
      for (const auto& t : split_list(*v)) cfg.bench.mu_list.push_back(std::stod(t));
    }
    if (auto v = get("bench", "repeats")) cfg.bench.repeats = std::stoi(*v);
    if (auto v = get("bench", "modes")) {
      cfg.bench.disjoint = false;
      cfg.bench.overlapping = false;
      for (const auto& t : split_list(*v)) {
        if (t == "disjoint")
          cfg.bench.disjoint = true;
        else if (t == "overlap" || t == "overlapping")
          cfg.bench.overlapping = true;
        else
          throw ConfigError("config: unknown benchmark mode '" + t + "'");
      }
    }
    if (auto v = get("run", "registry")) cfg.registry_path = *v == "default" ? "" : *v;
    if (auto v = get("run", "workers")) cfg.workers = std::stoi(*v);
    if (auto v = get("run", "seed")) cfg.seed = std::stoull(*v);
    if (auto v = get("run", "real_dir")) cfg.real_dir = *v;
    if (auto v = get("run", "real_symmetrize")) cfg.real_symmetrize = parse_bool(*v);
    if (auto v = get("run", "audit")) cfg.cache_audit = std::stoi(*v);
    if (auto v = get("similarity", "variant")) cfg.variant = onmi_variant_from_string(*v);
    if (auto v = get("asn", "k")) cfg.k = std::stoi(*v);
    if (auto v = get("asn", "delta")) {
      if (*v == "auto") {
        cfg.delta_auto = true;
      } else {
        cfg.delta_auto = false;
        cfg.delta_fixed = std::stod(*v);
      }
    }
    if (auto v = get("asn", "tau")) cfg.tau = std::stod(*v);
    if (auto v = get("analysis", "clusterer")) cfg.clusterer = *v;
    if (auto v = get("analysis", "null_trials")) cfg.null_trials = std::stoi(*v);
    if (auto v = get("output", "dir")) cfg.out_dir = *v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: bad value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

std::string canonical_params(const Params& params) {
  json j = json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j.dump();
}

std::string canonical_params(const ParamGrid& grid) {
  json j = json::object();
  for (const auto& [k, values] : grid) j[k] = values;
  return j.dump();
}

std::string cache_key(const std::string& algorithm_id, const std::string& params_canonical,
                      const std::string& network_digest, std::uint64_t seed) {
  std::string buf;
  buf.append(algorithm_id);
  buf.push_back('\x1f');
  buf.append(params_canonical);
  buf.push_back('\x1f');
  buf.append(network_digest);
  buf.push_back('\x1f');
  buf.append(std::to_string(seed));
  return sha256_hex(buf);
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto body = [&] {
    while (true) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  int spawn = std::min<int>(workers, static_cast<int>(count));
  pool.reserve(static_cast<std::size_t>(spawn));
  for (int w = 0; w < spawn; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace {

void atomic_write(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  static std::atomic<unsigned long long> counter{0};
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void merge_manifest(const PipelineConfig& config, const std::string& stage, json patch) {
  fs::path path = config.out_dir / "manifest.json";
  json manifest = json::object();
  if (fs::exists(path)) {
    try {
      manifest = json::parse(read_file(path));
    } catch (...) {
      manifest = json::object();
    }
  }
  manifest[stage] = std::move(patch);
  atomic_write(path, manifest.dump(2) + "\n");
}

json config_echo(const PipelineConfig& c) {
  json j;
  j["n"] = c.bench.n_list;
  j["mu"] = c.bench.mu_list;
  j["repeats"] = c.bench.repeats;
  j["disjoint"] = c.bench.disjoint;
  j["overlapping"] = c.bench.overlapping;
  j["variant"] = to_string(c.variant);
  j["k"] = c.k;
  j["delta"] = c.delta_auto ? json("auto") : json(c.delta_fixed);
  j["tau"] = c.tau;
  j["clusterer"] = c.clusterer;
  j["null_trials"] = c.null_trials;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string mode_tag(bool overlapping) { return overlapping ? "overlap" : "disjoint"; }

}  // namespace

Registry load_registry(const PipelineConfig& config) {
  if (config.registry_path.empty()) return Registry::desk_default();
  return Registry::load_tsv(config.registry_path);
}

std::vector<NetworkRef> stage_gen_bench(const PipelineConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path bench_dir = config.out_dir / "benchmarks";
  fs::create_directories(bench_dir);

  struct Cell {
    int n;
    double mu;
    bool overlapping;
    int repeat;
    std::string id;
  };
  std::vector<Cell> cells;
  for (int n : config.bench.n_list)
    for (double mu : config.bench.mu_list)
      for (int mode = 0; mode < 2; ++mode) {
        bool overlapping = mode == 1;
        if (overlapping && !config.bench.overlapping) continue;
        if (!overlapping && !config.bench.disjoint) continue;
        for (int r = 0; r < config.bench.repeats; ++r) {
          std::string id = "lfr_" + mode_tag(overlapping) + "_n" + std::to_string(n) + "_mu" +
                           format_double(mu) + "_r" + std::to_string(r);
          cells.push_back({n, mu, overlapping, r, id});
        }
      }

  std::vector<NetworkRef> nets(cells.size());
  parallel_for(cells.size(), config.workers, [&](std::size_t i) {
    const Cell& cell = cells[i];
    LfrParams params = lfr_desk_params(cell.n, cell.mu, cell.overlapping,
                                       derive_seed(config.seed, "bench", cell.id));
    LfrResult result = generate_lfr(params);
    NetworkRef ref;
    ref.id = cell.id;
    ref.synthetic = true;
    ref.edges_path = bench_dir / (cell.id + ".edges");
    ref.cover_path = bench_dir / (cell.id + ".gt");
    ref.realized_mu = result.realized_mu;
    ref.realized_mean_degree = result.realized_mean_degree;
    atomic_write(ref.edges_path, write_graph_string(result.graph));
    atomic_write(ref.cover_path, write_cover_string(result.ground_truth));
    nets[i] = std::move(ref);
  });

  // real-world ingestion: every regular file in the directory is an edge list
  if (!config.real_dir.empty()) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(config.real_dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<NetworkRef> real(files.size());
    parallel_for(files.size(), config.workers, [&](std::size_t i) {
      LoadedGraph lg = load_graph_file(files[i], config.real_symmetrize);
      NetworkRef ref;
      ref.id = "real_" + files[i].stem().string();
      ref.synthetic = false;
      ref.edges_path = bench_dir / (ref.id + ".edges");
      atomic_write(ref.edges_path, write_graph_string(lg.graph));
      if (!lg.ids.trivial()) {
        std::ostringstream ids;
        write_id_map(lg.ids, ids);
        atomic_write(bench_dir / (ref.id + ".ids"), ids.str());
      }
      real[i] = std::move(ref);
    });
    nets.insert(nets.end(), real.begin(), real.end());
  }

  std::sort(nets.begin(), nets.end(),
            [](const NetworkRef& a, const NetworkRef& b) { return a.id < b.id; });

  std::ostringstream manifest;
  manifest << "network_id,kind,edges_file,cover_file,realized_mu,realized_mean_degree\n";
  for (const auto& ref : nets) {
    manifest << ref.id << ',' << (ref.synthetic ? "lfr" : "real") << ','
             << ref.edges_path.filename().string() << ','
             << (ref.cover_path.empty() ? "-" : ref.cover_path.filename().string()) << ','
             << format_double(ref.realized_mu) << ',' << format_double(ref.realized_mean_degree)
             << '\n';
  }
  atomic_write(bench_dir / "manifest.csv", manifest.str());

  json patch = config_echo(config);
  patch["networks"] = nets.size();
  patch["seconds"] = seconds_since(t0);
  merge_manifest(config, "gen-bench", patch);
  return nets;
}

std::vector<NetworkRef> load_network_manifest(const PipelineConfig& config) {
  fs::path bench_dir = config.out_dir / "benchmarks";
  fs::path path = bench_dir / "manifest.csv";
  std::ifstream in(path);
  if (!in) throw IoError("no benchmark manifest at " + path.string() + " (run gen-bench first)");
  std::vector<NetworkRef> nets;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string id, kind, edges, cover, mu, kavg;
    std::getline(ls, id, ',');
    std::getline(ls, kind, ',');
    std::getline(ls, edges, ',');
    std::getline(ls, cover, ',');
    std::getline(ls, mu, ',');
    std::getline(ls, kavg, ',');
    NetworkRef ref;
    ref.id = id;
    ref.synthetic = kind == "lfr";
    ref.edges_path = bench_dir / edges;
    if (cover != "-") ref.cover_path = bench_dir / cover;
    ref.realized_mu = std::stod(mu);
    ref.realized_mean_degree = std::stod(kavg);
    nets.push_back(std::move(ref));
  }
  return nets;
}

namespace {

struct CacheEntry {
  RunStatus status = RunStatus::Failed;
  Params params;
  double score = 0.0;
  std::string message;
};

json params_to_json(const Params& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

Params params_from_json(const json& j) {
  Params p;
  for (auto it = j.begin(); it != j.end(); ++it) p[it.key()] = it.value().get<double>();
  return p;
}

}  // namespace

std::vector<RunSummary> stage_run(const PipelineConfig& config,
                                  const std::vector<NetworkRef>& networks,
                                  const Registry& registry) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path cache_dir = config.out_dir / "cache";
  fs::create_directories(cache_dir);

  // effective registry snapshot for reproducibility
  registry.save_tsv(config.out_dir / "registry.tsv");

  struct Task {
    std::size_t net;
    std::size_t algo;
    std::string key;
  };
  std::vector<Task> tasks;
  std::vector<std::string> net_digests(networks.size());
  for (std::size_t ni = 0; ni < networks.size(); ++ni)
    net_digests[ni] = sha256_hex(read_file(networks[ni].edges_path));
  for (std::size_t ni = 0; ni < networks.size(); ++ni)
    for (std::size_t ai = 0; ai < registry.entries().size(); ++ai) {
      const auto& spec = registry.entries()[ai];
      std::uint64_t run_seed = derive_seed(config.seed, spec.id, networks[ni].id);
      tasks.push_back({ni, ai,
                       cache_key(spec.id, canonical_params(spec.param_grid), net_digests[ni],
                                 run_seed)});
    }

  std::vector<RunSummary> results(tasks.size());
  std::vector<char> was_hit(tasks.size(), 0);

  auto execute = [&](const Task& task) -> RunRecord {
    const auto& net = networks[task.net];
    const auto& spec = registry.entries()[task.algo];
    std::uint64_t run_seed = derive_seed(config.seed, spec.id, net.id);
    LoadedGraph lg = load_graph_file(net.edges_path);
    fs::path workdir = config.out_dir / "work" / (net.id + "." + spec.id);
    fs::path gt = net.cover_path;
    RunRecord rec = grid_search(spec, lg.graph, run_seed, &workdir,
                                net.cover_path.empty() ? nullptr : &gt);
    rec.network_id = net.id;
    std::error_code ec;
    fs::remove_all(workdir, ec);
    return rec;
  };

  parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
    const Task& task = tasks[i];
    const auto& net = networks[task.net];
    const auto& spec = registry.entries()[task.algo];
    fs::path meta_path = cache_dir / (task.key + ".json");
    fs::path cover_path = cache_dir / (task.key + ".cover");

    RunSummary summary;
    summary.network_id = net.id;
    summary.algorithm_id = spec.id;

    if (fs::exists(meta_path)) {
      json j = json::parse(read_file(meta_path));
      summary.status = j["status"] == "ok"     ? RunStatus::Ok
                       : j["status"] == "timeout" ? RunStatus::Timeout
                                                  : RunStatus::Failed;
      summary.params = params_from_json(j["params"]);
      summary.score = j["score"].get<double>();
      summary.message = j["message"].get<std::string>();
      if (summary.status == RunStatus::Ok) summary.cover_path = cover_path;
      was_hit[i] = 1;
      results[i] = std::move(summary);
      return;
    }

    RunRecord rec = execute(task);
    if (rec.status == RunStatus::Ok)
      atomic_write(cover_path, write_cover_string(*rec.cover));
    json meta;
    meta["algorithm_id"] = spec.id;
    meta["network_id"] = net.id;
    meta["status"] = to_string(rec.status);
    meta["params"] = params_to_json(rec.params);
    meta["score"] = rec.score;
    meta["message"] = rec.message;
    meta["seconds"] = rec.seconds;
    atomic_write(meta_path, meta.dump() + "\n");

    summary.status = rec.status;
    summary.params = rec.params;
    summary.score = rec.score;
    summary.message = rec.message;
    if (rec.status == RunStatus::Ok) summary.cover_path = cover_path;
    results[i] = std::move(summary);
  });

  // cache soundness audit: recompute a deterministic sample of warm entries
  std::vector<std::size_t> hits;
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (was_hit[i]) hits.push_back(i);
  std::size_t audited = 0;
  if (!hits.empty() && config.cache_audit > 0) {
    Rng rng(derive_seed(config.seed, "audit", "run"));
    rng.shuffle(hits);
    std::size_t want = std::min<std::size_t>(hits.size(), static_cast<std::size_t>(config.cache_audit));
    std::vector<std::size_t> picked(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(want));
    parallel_for(picked.size(), config.workers, [&](std::size_t pi) {
      std::size_t i = picked[pi];
      RunRecord rec = execute(tasks[i]);
      const RunSummary& cached = results[i];
      bool same_status = to_string(rec.status) == to_string(cached.status);
      bool same_cover = true;
      if (rec.status == RunStatus::Ok && cached.status == RunStatus::Ok)
        same_cover = write_cover_string(*rec.cover) == read_file(cached.cover_path);
      if (!same_status || !same_cover)
        throw IoError("cache audit mismatch for " + cached.algorithm_id + " on " +
                      cached.network_id);
    });
    audited = want;
  }

  // deterministic run table (timings live in the cache metadata, not here)
  std::sort(results.begin(), results.end(), [](const RunSummary& a, const RunSummary& b) {
    return std::tie(a.network_id, a.algorithm_id) < std::tie(b.network_id, b.algorithm_id);
  });
  std::ostringstream table;
  table << "network_id\talgorithm_id\tstatus\tparams\tscore\tmessage\tcover_file\n";
  for (const auto& r : results) {
    std::string msg = r.message;
    for (char& c : msg)
      if (c == '\t' || c == '\n') c = ' ';
    table << r.network_id << '\t' << r.algorithm_id << '\t' << to_string(r.status) << '\t'
          << canonical_params(r.params) << '\t' << format_double(r.score) << '\t' << msg << '\t'
          << (r.cover_path.empty() ? "-" : r.cover_path.filename().string()) << '\n';
  }
  atomic_write(config.out_dir / "runs.tsv", table.str());

  long long ok = 0, failed = 0, timeout = 0;
  for (const auto& r : results) {
    if (r.status == RunStatus::Ok) ++ok;
    if (r.status == RunStatus::Failed) ++failed;
    if (r.status == RunStatus::Timeout) ++timeout;
  }
  json patch;
  patch["tasks"] = tasks.size();
  patch["ok"] = ok;
  patch["failed"] = failed;
  patch["timeout"] = timeout;
  patch["cache_hits"] = hits.size();
  patch["audited"] = audited;
  patch["seconds"] = seconds_since(t0);
  merge_manifest(config, "run", patch);
  return results;
}

std::vector<RunSummary> load_run_summaries(const PipelineConfig& config) {
  fs::path path = config.out_dir / "runs.tsv";
  std::ifstream in(path);
  if (!in) throw IoError("no run table at " + path.string() + " (run the run stage first)");
  std::vector<RunSummary> out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 7) throw ParseError("runs.tsv: malformed row");
    RunSummary r;
    r.network_id = cols[0];
    r.algorithm_id = cols[1];
    r.status = cols[2] == "ok" ? RunStatus::Ok
               : cols[2] == "timeout" ? RunStatus::Timeout
                                      : RunStatus::Failed;
    r.params = params_from_json(json::parse(cols[3]));
    r.score = std::stod(cols[4]);
    r.message = cols[5];
    if (cols[6] != "-") r.cover_path = config.out_dir / "cache" / cols[6];
    out.push_back(std::move(r));
  }
  return out;
}

SimilarityStore stage_similarity(const PipelineConfig& config,
                                 const std::vector<NetworkRef>& networks,
                                 const std::vector<RunSummary>& runs) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path sim_dir = config.out_dir / "similarity";
  for (OnmiVariant v : {OnmiVariant::MAX, OnmiVariant::LFK, OnmiVariant::SUM})
    fs::create_directories(sim_dir / to_string(v));

  std::map<std::string, std::vector<const RunSummary*>> by_network;
  for (const auto& r : runs)
    if (r.status == RunStatus::Ok) by_network[r.network_id].push_back(&r);

  SimilarityStore main_store;
  std::mutex store_mutex;

  parallel_for(networks.size(), config.workers, [&](std::size_t ni) {
    const auto& net = networks[ni];
    auto it = by_network.find(net.id);
    if (it == by_network.end()) return;
    LoadedGraph lg = load_graph_file(net.edges_path);
    int n = lg.graph.node_count();

    std::vector<std::pair<std::string, Cover>> covers;
    for (const RunSummary* r : it->second)
      covers.emplace_back(r->algorithm_id, load_cover_file(r->cover_path, n));
    if (net.synthetic && !net.cover_path.empty())
      covers.emplace_back(kGroundTruthId, load_cover_file(net.cover_path, n));
    std::sort(covers.begin(), covers.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (covers.size() < 2) return;

    for (OnmiVariant variant : {OnmiVariant::MAX, OnmiVariant::LFK, OnmiVariant::SUM}) {
      SimilarityMatrix m;
      for (const auto& [id, cover] : covers) m.ids.push_back(id);
      std::size_t count = covers.size();
      m.sim.assign(count, std::vector<double>(count, 1.0));
      for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j) {
          double s = onmi(covers[i].second, covers[j].second, variant);
          m.sim[i][j] = s;
          m.sim[j][i] = s;
        }
      std::ostringstream out;
      write_matrix_csv(m, out);
      atomic_write(sim_dir / to_string(variant) / (net.id + ".csv"), out.str());
      if (variant == config.variant) {
        std::lock_guard<std::mutex> lock(store_mutex);
        main_store[net.id] = std::move(m);
      }
    }
  });

  json patch;
  patch["networks"] = main_store.size();
  patch["variant"] = to_string(config.variant);
  patch["seconds"] = seconds_since(t0);
  merge_manifest(config, "similarity", patch);
  return main_store;
}

SimilarityStore load_similarity(const PipelineConfig& config, OnmiVariant variant,
                                bool synthetic_only) {
  fs::path dir = config.out_dir / "similarity" / to_string(variant);
  if (!fs::exists(dir))
    throw IoError("no similarity matrices at " + dir.string() + " (run similarity first)");
  std::set<std::string> synthetic;
  if (synthetic_only)
    for (const auto& net : load_network_manifest(config))
      if (net.synthetic) synthetic.insert(net.id);
  SimilarityStore store;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    std::string id = file.stem().string();
    if (synthetic_only && !synthetic.count(id)) continue;
    std::ifstream in(file);
    store[id] = read_matrix_csv(in);
  }
  return store;
}

AsnNet stage_build_asn(const PipelineConfig& config, const SimilarityStore& store) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path asn_dir = config.out_dir / "asn";
  fs::path analysis_dir = config.out_dir / "analysis";
  fs::create_directories(asn_dir);
  fs::create_directories(analysis_dir);

  AccumulateOptions opts;
  opts.k = config.k;
  AsnNet weighted = accumulate(store, opts);
  {
    std::ostringstream out;
    write_asn_csv(weighted, out);
    atomic_write(asn_dir / "asn_weighted.csv", out.str());
  }
  {
    std::vector<double> weights;
    for (const auto& e : weighted.edges()) weights.push_back(e.weight);
    std::ostringstream out;
    out << "weight,p_geq\n";
    if (!weights.empty())
      for (auto [w, p] : ccdf(weights)) out << format_double(w) << ',' << format_double(p) << '\n';
    atomic_write(analysis_dir / "ccdf.csv", out.str());
  }

  json patch;
  patch["nodes"] = weighted.nodes().size();
  patch["edges_weighted"] = weighted.edges().size();
  patch["seconds"] = seconds_since(t0);
  merge_manifest(config, "build-asn", patch);
  return weighted;
}

AsnArtifacts stage_backbone(const PipelineConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path asn_dir = config.out_dir / "asn";
  fs::path weighted_path = asn_dir / "asn_weighted.csv";
  std::ifstream in(weighted_path);
  if (!in) throw IoError("no weighted ASN at " + weighted_path.string() + " (run build-asn first)");
  AsnNet weighted = read_asn_csv(in);

  AsnNet scored = nc_score(weighted);
  {
    std::ostringstream out;
    write_asn_csv(scored, out);
    atomic_write(asn_dir / "asn_full.csv", out.str());
  }
  double delta = config.delta_auto ? select_delta(scored) : config.delta_fixed;
  bool isolated = false;
  AsnNet backboned = backbone(scored, delta, &isolated);
  {
    std::ostringstream out;
    write_asn_csv(backboned, out);
    atomic_write(asn_dir / "asn_backbone.csv", out.str());
  }
  atomic_write(asn_dir / "delta.txt", format_double(delta) + "\n");

  json patch;
  patch["delta"] = delta;
  patch["delta_mode"] = config.delta_auto ? "auto" : "fixed";
  patch["edges_backbone"] = backboned.edges().size();
  patch["isolated_after_backbone"] = isolated;
  patch["asn_digest"] = sha256_hex(read_file(asn_dir / "asn_backbone.csv"));
  patch["seconds"] = seconds_since(t0);
  merge_manifest(config, "backbone", patch);

  AsnArtifacts art;
  art.weighted = std::move(scored);
  art.backboned = std::move(backboned);
  art.delta = delta;
  return art;
}

AsnArtifacts load_asn(const PipelineConfig& config) {
  fs::path asn_dir = config.out_dir / "asn";
  AsnArtifacts art;
  {
    std::ifstream in(asn_dir / "asn_full.csv");
    if (!in) throw IoError("no scored ASN at " + (asn_dir / "asn_full.csv").string() +
                           " (run backbone first)");
    art.weighted = read_asn_csv(in);
    art.weighted.set_scored(true);
  }
  {
    std::ifstream in(asn_dir / "asn_backbone.csv");
    if (!in) throw IoError("no backbone at " + (asn_dir / "asn_backbone.csv").string());
    art.backboned = read_asn_csv(in);
    art.backboned.set_scored(true);
  }
  art.delta = std::stod(read_file(asn_dir / "delta.txt"));
  art.backboned.set_delta(art.delta);
  return art;
}

std::vector<RankEntry> stage_rank_gt(const PipelineConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path analysis_dir = config.out_dir / "analysis";
  fs::create_directories(analysis_dir);

  std::vector<RankEntry> ranking;
  SimilarityStore synth = load_similarity(config, config.variant, /*synthetic_only=*/true);
  if (!synth.empty()) {
    AccumulateOptions opts;
    opts.k = config.k;
    opts.include_ground_truth = true;
    AsnNet gt_net = accumulate(synth, opts);
    if (gt_net.index_of(kGroundTruthId) >= 0) ranking = ground_truth_ranking(gt_net);
  }
  std::ostringstream out;
  out << "Rank,Algorithm,Weight\n";
  for (const auto& r : ranking)
    out << r.rank << ',' << r.algorithm << ',' << format_double(r.weight) << '\n';
  atomic_write(analysis_dir / "gt_ranking.csv", out.str());

  json patch;
  patch["ranked"] = ranking.size();
  patch["synthetic_networks"] = synth.size();
  patch["seconds"] = seconds_since(t0);
  merge_manifest(config, "rank-gt", patch);
  return ranking;
}

namespace {

std::vector<RankEntry> load_or_compute_ranking(const PipelineConfig& config) {
  fs::path path = config.out_dir / "analysis" / "gt_ranking.csv";
  if (!fs::exists(path)) return stage_rank_gt(config);
  std::ifstream in(path);
  std::vector<RankEntry> out;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string rank, algo, weight;
    std::getline(ls, rank, ',');
    std::getline(ls, algo, ',');
    std::getline(ls, weight, ',');
    out.push_back({std::stoi(rank), algo, std::stod(weight)});
  }
  return out;
}

}  // namespace

void stage_analyze(const PipelineConfig& config, const Registry& registry) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path analysis_dir = config.out_dir / "analysis";
  fs::create_directories(analysis_dir);

  AsnArtifacts art = load_asn(config);
  const auto& node_ids = art.backboned.nodes();

  // ---- clustering
  ClusterResult clustering =
      cluster_asn(art.backboned, config.clusterer, derive_seed(config.seed, "cluster", "asn"));
  {
    std::ostringstream out;
    for (const auto& comm : clustering.cover.communities()) {
      for (std::size_t i = 0; i < comm.size(); ++i) {
        if (i) out << ' ';
        out << node_ids[static_cast<std::size_t>(comm[i])];
      }
      out << '\n';
    }
    atomic_write(analysis_dir / "asn_communities.txt", out.str());
  }

  // ---- headline ASN statistics
  {
    Graph bg = art.backboned.to_graph();
    std::ostringstream out;
    out << "metric,value\n";
    out << "nodes," << node_ids.size() << '\n';
    out << "edges_weighted," << art.weighted.edges().size() << '\n';
    out << "edges_backbone," << art.backboned.edges().size() << '\n';
    long long possible =
        static_cast<long long>(node_ids.size()) * (static_cast<long long>(node_ids.size()) - 1) / 2;
    out << "edge_density_backbone,"
        << format_double(possible > 0 ? static_cast<double>(art.backboned.edges().size()) /
                                            static_cast<double>(possible)
                                      : 0.0)
        << '\n';
    out << "delta," << format_double(art.delta) << '\n';
    out << "transitivity," << format_double(transitivity(bg)) << '\n';
    double apl = -1.0;
    {
      // largest component (the backbone may be disconnected)
      std::vector<std::vector<int>> comps;
      std::vector<char> seen(node_ids.size(), 0);
      for (int s = 0; s < bg.node_count(); ++s) {
        if (seen[static_cast<std::size_t>(s)]) continue;
        std::vector<int> stack{s}, members;
        seen[static_cast<std::size_t>(s)] = 1;
        while (!stack.empty()) {
          int v = stack.back();
          stack.pop_back();
          members.push_back(v);
          for (auto [u, w] : bg.neighbors(v)) {
            (void)w;
            if (!seen[static_cast<std::size_t>(u)]) {
              seen[static_cast<std::size_t>(u)] = 1;
              stack.push_back(u);
            }
          }
        }
        comps.push_back(std::move(members));
      }
      std::sort(comps.begin(), comps.end(),
                [](const auto& a, const auto& b) { return a.size() > b.size(); });
      if (!comps.empty() && comps.front().size() >= 2) {
        std::vector<int> comp = comps.front();
        std::sort(comp.begin(), comp.end());
        apl = avg_path_length(bg, &comp);
      }
    }
    out << "avg_path_length," << (apl < 0 ? std::string("-") : format_double(apl)) << '\n';
    out << "codelength_one_module," << format_double(clustering.codelength_one_module) << '\n';
    out << "codelength_clustered,"
        << (clustering.codelength_clustered ? format_double(*clustering.codelength_clustered)
                                            : std::string("-"))
        << '\n';
    out << "asn_communities," << clustering.cover.community_count() << '\n';
    atomic_write(analysis_dir / "asn_stats.csv", out.str());
  }

  // ---- feature table
  {
    std::map<std::string, AlgorithmFlags> metadata;
    for (const auto& spec : registry.entries()) metadata[spec.id] = spec.flags;
    auto rows = feature_table(clustering.cover, node_ids, metadata);
    std::ostringstream out;
    out << "ID,n,Over,Spr,Q,NSim\n";
    for (const auto& r : rows)
      out << r.community << ',' << r.size << ',' << format_double(r.over) << ','
          << format_double(r.spr) << ',' << format_double(r.q) << ',' << format_double(r.nsim)
          << '\n';
    atomic_write(analysis_dir / "feature_table.csv", out.str());
  }

  // ---- descriptive statistics table (per run -> per algorithm -> per community)
  {
    auto runs = load_run_summaries(config);
    auto networks = load_network_manifest(config);
    std::map<std::string, std::size_t> net_index;
    for (std::size_t i = 0; i < networks.size(); ++i) net_index[networks[i].id] = i;
    std::vector<const RunSummary*> ok_runs;
    for (const auto& r : runs)
      if (r.status == RunStatus::Ok) ok_runs.push_back(&r);
    std::vector<std::pair<std::string, RunStats>> per_run(ok_runs.size());
    parallel_for(ok_runs.size(), config.workers, [&](std::size_t i) {
      const RunSummary& r = *ok_runs[i];
      const NetworkRef& net = networks[net_index.at(r.network_id)];
      LoadedGraph lg = load_graph_file(net.edges_path);
      Cover cover = load_cover_file(r.cover_path, lg.graph.node_count());
      bool overlapping = registry.contains(r.algorithm_id)
                             ? registry.get(r.algorithm_id).flags.overlapping
                             : !cover.is_partition();
      per_run[i] = {r.algorithm_id, run_statistics(lg.graph, cover, overlapping)};
    });
    std::map<std::string, std::vector<RunStats>> grouped;
    for (auto& [id, st] : per_run) grouped[id].push_back(st);
    auto rows = stats_table(clustering.cover, node_ids, grouped);
    std::ostringstream out;
    out << "ID,Algorithms,AvgNumComms,AvgNumComms_se,AvgSize,AvgSize_se,AvgDensity,AvgDensity_se,"
           "AvgQ,AvgQ_se,AvgConductance,AvgConductance_se,AvgNcut,AvgNcut_se\n";
    for (const auto& r : rows)
      out << r.community << ',' << r.algorithms << ',' << format_double(r.num_communities) << ','
          << format_double(r.num_communities_se) << ',' << format_double(r.mean_size) << ','
          << format_double(r.mean_size_se) << ',' << format_double(r.density) << ','
          << format_double(r.density_se) << ',' << format_double(r.modularity) << ','
          << format_double(r.modularity_se) << ',' << format_double(r.conductance) << ','
          << format_double(r.conductance_se) << ',' << format_double(r.ncut) << ','
          << format_double(r.ncut_se) << '\n';
    atomic_write(analysis_dir / "stats_table.csv", out.str());
  }

  // ---- average-path-length null model on the top-ranked algorithms
  {
    auto ranking = load_or_compute_ranking(config);
    Graph bg = art.backboned.to_graph();
    std::vector<int> nodeset;
    for (const auto& r : ranking) {
      if (static_cast<int>(nodeset.size()) >= 10) break;
      int idx = art.backboned.index_of(r.algorithm);
      if (idx >= 0) nodeset.push_back(idx);
    }
    std::sort(nodeset.begin(), nodeset.end());
    std::ostringstream out, samples_out;
    out << "observed,p_value,trials,resamples,nodes\n";
    samples_out << "trial,avg_path_length\n";
    if (nodeset.size() >= 2) {
      try {
        NullModelResult res = apl_null_model(bg, nodeset, config.null_trials,
                                             derive_seed(config.seed, "null", "apl"));
        std::string names;
        for (int v : nodeset) {
          if (!names.empty()) names += ';';
          names += node_ids[static_cast<std::size_t>(v)];
        }
        out << format_double(res.observed) << ',' << format_double(res.p_value) << ','
            << res.trials << ',' << res.resamples << ',' << names << '\n';
        for (std::size_t i = 0; i < res.samples.size(); ++i)
          samples_out << i << ',' << format_double(res.samples[i]) << '\n';
      } catch (const std::exception& e) {
        std::string msg = e.what();
        for (char& c : msg)
          if (c == ',') c = ';';
        out << "-,-,-,-," << msg << '\n';
      }
    } else {
      out << "-,-,-,-,insufficient ranked algorithms in the backbone\n";
    }
    atomic_write(analysis_dir / "null_model.csv", out.str());
    atomic_write(analysis_dir / "null_samples.csv", samples_out.str());
  }

  json patch;
  patch["seconds"] = seconds_since(t0);
  patch["asn_communities"] = clustering.cover.community_count();
  merge_manifest(config, "analyze", patch);
}

namespace {

// Clusters an aggregation-variant net after its own backboning; empty result
// when the variant cannot be backboned (reported via note).
std::optional<Cover> cluster_variant(const AsnNet& net, const PipelineConfig& config,
                                     std::string& note) {
  try {
    AsnNet scored = nc_score(net);
    double delta = select_delta(scored);
    AsnNet kept = backbone(scored, delta);
    return cluster_asn(kept, config.clusterer, derive_seed(config.seed, "cluster", "variant"))
        .cover;
  } catch (const std::exception& e) {
    note = e.what();
    return std::nullopt;
  }
}

}  // namespace

void stage_robustness(const PipelineConfig& config) {
  auto t0 = std::chrono::steady_clock::now();
  fs::path analysis_dir = config.out_dir / "analysis";
  fs::create_directories(analysis_dir);
  AsnArtifacts art = load_asn(config);

  std::ostringstream out;
  out << "metric,value,note\n";
  AccumulateOptions opts;
  opts.k = config.k;

  std::map<OnmiVariant, AsnNet> variant_net;
  for (OnmiVariant v : {OnmiVariant::MAX, OnmiVariant::LFK, OnmiVariant::SUM})
    variant_net.emplace(v, accumulate(load_similarity(config, v), opts));
  auto corr_row = [&](const std::string& name, const AsnNet& a, const AsnNet& b) {
    try {
      out << name << ',' << format_double(weight_correlation(a, b)) << ",\n";
    } catch (const std::exception& e) {
      out << name << ",-," << e.what() << '\n';
    }
  };
  corr_row("weight_corr_max_lfk", variant_net.at(OnmiVariant::MAX),
           variant_net.at(OnmiVariant::LFK));
  corr_row("weight_corr_max_sum", variant_net.at(OnmiVariant::MAX),
           variant_net.at(OnmiVariant::SUM));
  corr_row("weight_corr_lfk_sum", variant_net.at(OnmiVariant::LFK),
           variant_net.at(OnmiVariant::SUM));

  auto networks = load_network_manifest(config);
  bool any_real = false;
  for (const auto& net : networks) any_real |= !net.synthetic;
  if (any_real) {
    std::map<std::string, bool> synthetic;
    for (const auto& n : networks) synthetic[n.id] = n.synthetic;
    for (OnmiVariant v : {OnmiVariant::MAX, OnmiVariant::LFK, OnmiVariant::SUM}) {
      SimilarityStore all = load_similarity(config, v);
      SimilarityStore lfr, real;
      for (auto& [id, m] : all) (synthetic[id] ? lfr : real)[id] = m;
      if (lfr.empty() || real.empty()) continue;
      try {
        AsnNet a = accumulate(lfr, opts);
        AsnNet b = accumulate(real, opts);
        std::set<std::string> ids(a.nodes().begin(), a.nodes().end());
        ids.insert(b.nodes().begin(), b.nodes().end());
        std::vector<std::string> nodes(ids.begin(), ids.end());
        auto expand = [&](const AsnNet& src) {
          std::vector<AsnEdge> edges;
          std::map<std::string, int> index;
          for (int i = 0; i < static_cast<int>(nodes.size()); ++i)
            index[nodes[static_cast<std::size_t>(i)]] = i;
          for (const auto& e : src.edges())
            edges.push_back({index[src.nodes()[static_cast<std::size_t>(e.a)]],
                             index[src.nodes()[static_cast<std::size_t>(e.b)]], e.weight, 0.0});
          return AsnNet(nodes, std::move(edges));
        };
        out << "weight_corr_lfr_real_" << to_string(v) << ','
            << format_double(weight_correlation(expand(a), expand(b))) << ",\n";
      } catch (const std::exception& e) {
        out << "weight_corr_lfr_real_" << to_string(v) << ",-," << e.what() << '\n';
      }
    }
  }

  // aggregation options: mutual top-k (main) vs average vs threshold
  SimilarityStore store = load_similarity(config, config.variant);
  ClusterResult main_clusters =
      cluster_asn(art.backboned, config.clusterer, derive_seed(config.seed, "cluster", "asn"));
  std::string note_avg, note_thr;
  auto avg_cover = cluster_variant(aggregate_average(store), config, note_avg);
  auto thr_cover = cluster_variant(aggregate_threshold(store, config.tau), config, note_thr);
  if (avg_cover)
    out << "agreement_average,"
        << format_double(partition_agreement(main_clusters.cover, *avg_cover)) << ",\n";
  else
    out << "agreement_average,-," << note_avg << '\n';
  if (thr_cover)
    out << "agreement_threshold,"
        << format_double(partition_agreement(main_clusters.cover, *thr_cover)) << ','
        << "tau=" << format_double(config.tau) << '\n';
  else
    out << "agreement_threshold,-," << note_thr << '\n';
  atomic_write(analysis_dir / "robustness.csv", out.str());

  json patch;
  patch["seconds"] = seconds_since(t0);
  merge_manifest(config, "robustness", patch);
}

std::filesystem::path run_pipeline(const PipelineConfig& config) {
  config.validate();
  fs::create_directories(config.out_dir);
  Registry registry = load_registry(config);
  auto networks = stage_gen_bench(config);
  auto runs = stage_run(config, networks, registry);
  auto store = stage_similarity(config, networks, runs);
  stage_build_asn(config, store);
  stage_backbone(config);
  stage_rank_gt(config);
  stage_analyze(config, registry);
  stage_robustness(config);
  return config.out_dir;
}

}  // namespace asnkit
