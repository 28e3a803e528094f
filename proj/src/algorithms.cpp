#include "asnkit/algorithms.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "asnkit/metrics.hpp"
#include "builtins.hpp"
#include "json.hpp"

namespace asnkit {

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Ok: return "ok";
    case RunStatus::Failed: return "failed";
    case RunStatus::Timeout: return "timeout";
  }
  return "failed";
}

const AlgorithmSpec& Registry::get(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw ValueError("registry: unknown algorithm '" + id + "'");
  return entries_[it->second];
}

bool Registry::contains(const std::string& id) const { return index_.count(id) > 0; }

void Registry::add(AlgorithmSpec spec) {
  if (spec.id.empty()) throw ValueError("registry: empty algorithm id");
  if (spec.kind == AlgoKind::Builtin) builtin_dispatch_name(spec.id);  // validates
  if (!index_.emplace(spec.id, entries_.size()).second)
    throw ValueError("registry: duplicate algorithm id '" + spec.id + "'");
  entries_.push_back(std::move(spec));
}

const std::vector<std::string>& builtin_catalog() {
  static const std::vector<std::string> catalog = {
      "labelprop", "slpa",     "louvain", "cnm",       "girvan_newman",
      "walktrap",  "kclique",  "hlc",     "nsim_aggl", "infomap_2l"};
  return catalog;
}

std::string builtin_dispatch_name(const std::string& registry_id) {
  std::string best;
  for (const auto& name : builtin_catalog()) {
    if (registry_id == name ||
        (registry_id.size() > name.size() + 1 && registry_id.compare(0, name.size(), name) == 0 &&
         registry_id[name.size()] == '_')) {
      if (name.size() > best.size()) best = name;
    }
  }
  if (best.empty())
    throw ValueError("registry: '" + registry_id + "' does not name a builtin variant");
  return best;
}

namespace {

int param_as_int(const Params& params, const std::string& name, int fallback) {
  auto it = params.find(name);
  if (it == params.end()) return fallback;
  double v = it->second;
  if (std::floor(v) != v)
    throw ValueError("parameter '" + name + "' must be an integer, got " + std::to_string(v));
  return static_cast<int>(v);
}

double param_as_double(const Params& params, const std::string& name, double fallback) {
  auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

}  // namespace

Cover run_builtin(const std::string& id, const Graph& g, const Params& params,
                  std::uint64_t seed) {
  using namespace detail;
  if (id == "labelprop") return labelprop(g, seed);
  if (id == "slpa") return slpa(g, param_as_double(params, "r", 0.3), seed);
  if (id == "louvain") return louvain(g, seed);
  if (id == "cnm") return cnm(g);
  if (id == "girvan_newman") return girvan_newman(g);
  if (id == "walktrap") return walktrap(g, param_as_int(params, "t", 4));
  if (id == "kclique") return kclique(g, param_as_int(params, "k", 3));
  if (id == "hlc") return hlc(g);
  if (id == "nsim_aggl") {
    int fallback = std::max(2, (g.node_count() + 4) / 5);
    int cut = param_as_int(params, "cut", fallback);
    // clamp the requested cluster count to the sensible range for this graph
    cut = std::min(cut, std::max(2, (g.node_count() + 4) / 5));
    return nsim_aggl(g, cut);
  }
  if (id == "infomap_2l") return infomap_2l(g, seed);
  throw ValueError("unknown builtin algorithm '" + id + "'");
}

std::vector<Params> enumerate_grid(const ParamGrid& grid) {
  std::vector<Params> out{{}};
  for (const auto& [name, values] : grid) {
    if (values.empty()) throw ValueError("parameter grid for '" + name + "' is empty");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    std::vector<Params> next;
    next.reserve(out.size() * sorted.size());
    for (const auto& base : out)
      for (double v : sorted) {
        Params p = base;
        p[name] = v;
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

double selection_score(const Graph& g, const Cover& cover) {
  if (g.edge_count() == 0) return 0.0;
  if (cover.is_partition()) return modularity(g, cover);
  return lazar_modularity(g, cover);
}

namespace {

std::string substitute(const std::string& tmpl, const std::string& key, const std::string& value) {
  std::string out;
  std::string needle = "{" + key + "}";
  std::size_t pos = 0;
  while (true) {
    std::size_t hit = tmpl.find(needle, pos);
    if (hit == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      return out;
    }
    out.append(tmpl, pos, hit - pos);
    out.append(value);
    pos = hit + needle.size();
  }
}

// Runs a shell command with a wall-clock timeout; the whole process group is
// killed on expiry. Returns (exit_code, timed_out).
std::pair<int, bool> run_with_timeout(const std::string& command, double timeout_sec) {
  pid_t pid = fork();
  if (pid < 0) throw IoError("fork failed");
  if (pid == 0) {
    setpgid(0, 0);
    execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  setpgid(pid, pid);
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(timeout_sec));
  while (true) {
    int status = 0;
    pid_t done = waitpid(pid, &status, WNOHANG);
    if (done == pid) {
      if (WIFEXITED(status)) return {WEXITSTATUS(status), false};
      return {128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0), false};
    }
    if (done < 0) throw IoError("waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      int ignored = 0;
      waitpid(pid, &ignored, 0);
      return {-1, true};
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
}

}  // namespace

RunRecord run_external(const AlgorithmSpec& spec, const Graph& g,
                       const std::filesystem::path& workdir, std::uint64_t seed,
                       const std::filesystem::path* ground_truth_sidecar) {
  RunRecord rec;
  rec.algorithm_id = spec.id;
  rec.status = RunStatus::Failed;
  auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  };
  try {
    std::filesystem::create_directories(workdir);
    auto input = workdir / (spec.id + ".edges");
    auto output = workdir / (spec.id + ".out");
    write_graph_file(g, input);
    if (ground_truth_sidecar && std::filesystem::exists(*ground_truth_sidecar))
      std::filesystem::copy_file(*ground_truth_sidecar, input.string() + ".gt",
                                 std::filesystem::copy_options::overwrite_existing);
    std::error_code ec;
    std::filesystem::remove(output, ec);

    std::string cmd = substitute(spec.command_template, "input", input.string());
    cmd = substitute(cmd, "output", output.string());
    cmd = substitute(cmd, "seed", std::to_string(seed));

    auto [code, timed_out] = run_with_timeout(cmd, spec.timeout_sec);
    rec.seconds = elapsed();
    if (timed_out) {
      rec.status = RunStatus::Timeout;
      rec.message = "timed out after " + std::to_string(spec.timeout_sec) + "s";
      return rec;
    }
    if (code != 0) {
      rec.message = "exit code " + std::to_string(code);
      return rec;
    }
    if (!std::filesystem::exists(output)) {
      rec.message = "command produced no output file";
      return rec;
    }
    rec.cover = load_cover_file(output, g.node_count());
    rec.status = RunStatus::Ok;
  } catch (const std::exception& e) {
    rec.cover.reset();
    rec.status = RunStatus::Failed;
    rec.message = e.what();
    rec.seconds = elapsed();
  }
  return rec;
}

RunRecord grid_search(const AlgorithmSpec& spec, const Graph& g, std::uint64_t seed,
                      const std::filesystem::path* workdir,
                      const std::filesystem::path* ground_truth_sidecar) {
  RunRecord best;
  best.algorithm_id = spec.id;
  best.status = RunStatus::Failed;
  best.message = "no grid points";

  auto points = enumerate_grid(spec.param_grid);
  auto started = std::chrono::steady_clock::now();
  bool saw_timeout = false;

  for (const auto& params : points) {
    try {
      Cover cover;
      if (spec.kind == AlgoKind::Builtin) {
        cover = run_builtin(builtin_dispatch_name(spec.id), g, params, seed);
      } else {
        AlgorithmSpec point = spec;
        for (const auto& [name, value] : params)
          point.command_template =
              substitute(point.command_template, name, format_double(value));
        RunRecord sub = run_external(point, g,
                                     workdir ? *workdir : std::filesystem::temp_directory_path(),
                                     seed, ground_truth_sidecar);
        if (sub.status != RunStatus::Ok) {
          saw_timeout = saw_timeout || sub.status == RunStatus::Timeout;
          if (best.status != RunStatus::Ok) best.message = sub.message;
          continue;
        }
        cover = *sub.cover;
      }
      double score = selection_score(g, cover);
      // enumeration order is lexicographic, so strict improvement keeps the
      // smallest parameter tuple on ties
      if (best.status != RunStatus::Ok || score > best.score) {
        best.status = RunStatus::Ok;
        best.params = params;
        best.cover = std::move(cover);
        best.score = score;
        best.message.clear();
      }
    } catch (const std::exception& e) {
      if (best.status != RunStatus::Ok) best.message = e.what();
    }
  }
  best.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  if (best.status != RunStatus::Ok && saw_timeout) best.status = RunStatus::Timeout;
  return best;
}

namespace {

std::string grid_to_json(const ParamGrid& grid) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, values] : grid) j[name] = values;
  return j.dump();
}

ParamGrid grid_from_json(const std::string& text) {
  ParamGrid grid;
  if (text.empty() || text == "-") return grid;
  nlohmann::json j = nlohmann::json::parse(text);
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::vector<double> values;
    for (const auto& v : it.value()) values.push_back(v.get<double>());
    grid[it.key()] = values;
  }
  return grid;
}

}  // namespace

Registry Registry::desk_default() {
  Registry reg;
  auto add_builtin = [&](const std::string& id, ParamGrid grid, AlgorithmFlags flags) {
    AlgorithmSpec spec;
    spec.id = id;
    spec.kind = AlgoKind::Builtin;
    spec.param_grid = std::move(grid);
    spec.flags = flags;
    reg.add(std::move(spec));
  };

  add_builtin("louvain", {}, {.modularity_based = true});
  add_builtin("cnm", {}, {.modularity_based = true});
  add_builtin("girvan_newman", {}, {.spreading = true});
  add_builtin("walktrap_t2", {{"t", {2}}}, {.spreading = true});
  add_builtin("walktrap_t4", {{"t", {4}}}, {.spreading = true});
  add_builtin("labelprop", {}, {.spreading = true});
  add_builtin("slpa_r01", {{"r", {0.1}}}, {.overlapping = true, .spreading = true});
  add_builtin("slpa_r03", {{"r", {0.3}}}, {.overlapping = true, .spreading = true});
  add_builtin("slpa_r05", {{"r", {0.5}}}, {.overlapping = true, .spreading = true});
  add_builtin("kclique_3", {{"k", {3}}}, {.overlapping = true});
  add_builtin("kclique_4", {{"k", {4}}}, {.overlapping = true});
  add_builtin("kclique_5", {{"k", {5}}}, {.overlapping = true});
  add_builtin("hlc", {}, {.overlapping = true, .nsim = true});
  add_builtin("infomap_2l", {}, {.spreading = true});
  add_builtin("nsim_aggl", {{"cut", {2, 4, 8, 12, 16}}}, {.nsim = true});
  add_builtin("slpa_grid", {{"r", {0.1, 0.2, 0.3, 0.4, 0.5}}},
              {.overlapping = true, .spreading = true});

  AlgorithmSpec clone;
  clone.id = "gt_clone";
  clone.kind = AlgoKind::External;
  clone.command_template = "cp {input}.gt {output}";
  clone.timeout_sec = 30.0;
  reg.add(std::move(clone));
  return reg;
}

Registry Registry::load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open registry " + path.string());
  Registry reg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols[0] == "id") continue;  // header
    if (cols.size() != 9)
      throw ParseError("registry line " + std::to_string(lineno) + ": expected 9 columns, got " +
                       std::to_string(cols.size()));
    AlgorithmSpec spec;
    spec.id = cols[0];
    if (cols[1] == "builtin")
      spec.kind = AlgoKind::Builtin;
    else if (cols[1] == "external")
      spec.kind = AlgoKind::External;
    else
      throw ParseError("registry line " + std::to_string(lineno) + ": kind must be builtin|external");
    spec.command_template = cols[2] == "-" ? "" : cols[2];
    spec.timeout_sec = cols[3] == "-" ? 120.0 : std::stod(cols[3]);
    try {
      spec.param_grid = grid_from_json(cols[4]);
    } catch (const std::exception& e) {
      throw ParseError("registry line " + std::to_string(lineno) + ": bad param grid: " + e.what());
    }
    auto flag = [&](const std::string& s) { return s == "1" || s == "true" || s == "yes"; };
    spec.flags.overlapping = flag(cols[5]);
    spec.flags.spreading = flag(cols[6]);
    spec.flags.modularity_based = flag(cols[7]);
    spec.flags.nsim = flag(cols[8]);
    reg.add(std::move(spec));
  }
  return reg;
}

void Registry::save_tsv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write registry " + path.string());
  out << "id\tkind\tcommand_template\ttimeout\tparam_grid\toverlapping\tspreading\tmodularity_based\tnsim\n";
  for (const auto& spec : entries_) {
    out << spec.id << '\t' << (spec.kind == AlgoKind::Builtin ? "builtin" : "external") << '\t'
        << (spec.command_template.empty() ? "-" : spec.command_template) << '\t'
        << format_double(spec.timeout_sec) << '\t' << grid_to_json(spec.param_grid) << '\t'
        << (spec.flags.overlapping ? 1 : 0) << '\t' << (spec.flags.spreading ? 1 : 0) << '\t'
        << (spec.flags.modularity_based ? 1 : 0) << '\t' << (spec.flags.nsim ? 1 : 0) << '\n';
  }
}

}  // namespace asnkit
