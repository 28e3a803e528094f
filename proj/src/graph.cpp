#include "asnkit/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "asnkit/digest.hpp"

namespace asnkit {

namespace {

std::uint64_t pair_key(int u, int v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

}  // namespace

Graph::Graph(int n, std::vector<Edge> edges, bool weighted)
    : n_(n), weighted_(weighted), edges_(std::move(edges)) {
  if (n < 0) throw ValueError("graph: negative node count");
  adj_.assign(static_cast<std::size_t>(n), {});
  strength_.assign(static_cast<std::size_t>(n), 0.0);
  for (auto& e : edges_) {
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u == e.v) throw ValueError("graph: self-loop at node " + std::to_string(e.u));
    if (e.u < 0 || e.v >= n)
      throw ValueError("graph: edge (" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       ") outside 0.." + std::to_string(n - 1));
    if (!(e.w > 0.0)) throw ValueError("graph: non-positive weight on edge " +
                                       std::to_string(e.u) + "," + std::to_string(e.v));
    if (!weighted_) e.w = 1.0;
    if (!edge_keys_.insert(pair_key(e.u, e.v)).second)
      throw ValueError("graph: duplicate edge (" + std::to_string(e.u) + "," +
                       std::to_string(e.v) + ")");
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  for (const auto& e : edges_) {
    adj_[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
    adj_[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
    strength_[static_cast<std::size_t>(e.u)] += e.w;
    strength_[static_cast<std::size_t>(e.v)] += e.w;
    total_weight_ += e.w;
  }
  for (auto& nbrs : adj_) std::sort(nbrs.begin(), nbrs.end());
}

Graph Graph::from_pairs(int n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [u, v] : pairs) edges.push_back({u, v, 1.0});
  return Graph(n, std::move(edges), false);
}

bool Graph::has_edge(int u, int v) const {
  if (u > v) std::swap(u, v);
  return edge_keys_.count(pair_key(u, v)) > 0;
}

double Graph::edge_weight(int u, int v) const {
  if (u < 0 || v < 0 || u >= n_ || v >= n_) return 0.0;
  const auto& nbrs = adj_[static_cast<std::size_t>(u)];
  auto it = std::lower_bound(nbrs.begin(), nbrs.end(), std::make_pair(v, 0.0));
  if (it != nbrs.end() && it->first == v) return it->second;
  return 0.0;
}

Cover::Cover(int n, std::vector<std::vector<int>> communities)
    : n_(n), comms_(std::move(communities)) {
  if (n < 0) throw ValueError("cover: negative node count");
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (auto& c : comms_) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    if (c.empty()) throw ValueError("cover: empty community");
    if (c.front() < 0 || c.back() >= n)
      throw ValueError("cover: node id " + std::to_string(c.back() >= n ? c.back() : c.front()) +
                       " outside 0.." + std::to_string(n - 1));
    for (int v : c) seen[static_cast<std::size_t>(v)] = 1;
  }
  for (int v = 0; v < n; ++v)
    if (!seen[static_cast<std::size_t>(v)])
      throw ValueError("cover: node " + std::to_string(v) + " belongs to no community");
  std::sort(comms_.begin(), comms_.end());
}

Cover Cover::with_singleton_completion(int n, std::vector<std::vector<int>> communities) {
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (const auto& c : communities)
    for (int v : c) {
      if (v < 0 || v >= n)
        throw ValueError("cover: node id " + std::to_string(v) + " outside 0.." +
                         std::to_string(n - 1));
      seen[static_cast<std::size_t>(v)] = 1;
    }
  for (int v = 0; v < n; ++v)
    if (!seen[static_cast<std::size_t>(v)]) communities.push_back({v});
  return Cover(n, std::move(communities));
}

Cover Cover::singletons(int n) {
  std::vector<std::vector<int>> comms;
  comms.reserve(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) comms.push_back({v});
  return Cover(n, std::move(comms));
}

std::vector<int> Cover::membership_counts() const {
  std::vector<int> s(static_cast<std::size_t>(n_), 0);
  for (const auto& c : comms_)
    for (int v : c) ++s[static_cast<std::size_t>(v)];
  return s;
}

bool Cover::is_partition() const {
  std::size_t total = 0;
  for (const auto& c : comms_) total += c.size();
  if (total != static_cast<std::size_t>(n_)) return false;
  for (int count : membership_counts())
    if (count != 1) return false;
  return true;
}

bool IdMap::trivial() const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] != std::to_string(i)) return false;
  return true;
}

namespace {

bool parse_int_strict(const std::string& tok, long long& out) {
  if (tok.empty()) return false;
  std::size_t i = tok[0] == '-' ? 1 : 0;
  if (i == tok.size()) return false;
  for (; i < tok.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return false;
  try {
    out = std::stoll(tok);
  } catch (...) {
    return false;
  }
  return true;
}

bool parse_double_strict(const std::string& tok, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(tok, &pos);
    return pos == tok.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

}  // namespace

LoadedGraph load_graph(std::istream& in, bool symmetrize) {
  std::string line;
  long long pinned_n = -1;
  std::unordered_map<std::string, int> label_to_id;
  std::vector<std::string> labels;
  // first-seen orientation per unordered pair, plus accumulated weight
  std::unordered_map<std::uint64_t, std::pair<bool, double>> acc;  // key -> (first_was_uv, w)
  std::vector<std::pair<int, int>> order;                          // unordered pairs, first-seen order
  bool any_weight_column = false;
  std::size_t lineno = 0;

  auto intern = [&](const std::string& tok, std::size_t ln) -> int {
    if (pinned_n >= 0) {
      long long id;
      if (!parse_int_strict(tok, id) || id < 0 || id >= pinned_n)
        throw ParseError("edge list line " + std::to_string(ln) + ": node id '" + tok +
                         "' not an integer in 0.." + std::to_string(pinned_n - 1));
      return static_cast<int>(id);
    }
    auto it = label_to_id.find(tok);
    if (it != label_to_id.end()) return it->second;
    int id = static_cast<int>(labels.size());
    labels.push_back(tok);
    label_to_id.emplace(tok, id);
    return id;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first[0] == '#') {
      std::string word;
      long long n = -1;
      if (lineno == 1 && ls >> word && word == "nodes" && ls >> n && n >= 0) pinned_n = n;
      continue;
    }
    std::string a = first, b, wtok, extra;
    if (!(ls >> b)) throw ParseError("edge list line " + std::to_string(lineno) + ": expected two node ids");
    double w = 1.0;
    if (ls >> wtok) {
      if (!parse_double_strict(wtok, w))
        throw ParseError("edge list line " + std::to_string(lineno) + ": non-numeric weight '" + wtok + "'");
      if (!(w > 0.0))
        throw ValueError("edge list line " + std::to_string(lineno) + ": weight must be positive");
      any_weight_column = true;
      if (ls >> extra)
        throw ParseError("edge list line " + std::to_string(lineno) + ": trailing token '" + extra + "'");
    }
    int u = intern(a, lineno);
    int v = intern(b, lineno);
    if (u == v)
      throw ParseError("edge list line " + std::to_string(lineno) + ": self-loop on '" + a + "'");
    int lo = std::min(u, v), hi = std::max(u, v);
    bool is_uv = (u == lo);
    std::uint64_t key = pair_key(lo, hi);
    auto it = acc.find(key);
    if (it == acc.end()) {
      acc.emplace(key, std::make_pair(is_uv, w));
      order.emplace_back(lo, hi);
    } else {
      if (it->second.first != is_uv && !symmetrize)
        throw ParseError("edge list line " + std::to_string(lineno) +
                         ": reversed duplicate of an earlier edge (directed input?); "
                         "pass symmetrize to fold orientations");
      it->second.second += w;
    }
  }

  int n = pinned_n >= 0 ? static_cast<int>(pinned_n) : static_cast<int>(labels.size());
  std::vector<Edge> edges;
  edges.reserve(order.size());
  bool weighted = any_weight_column;
  for (auto [u, v] : order) {
    double w = acc[pair_key(u, v)].second;
    if (w != 1.0) weighted = true;
    edges.push_back({u, v, w});
  }
  LoadedGraph out;
  out.graph = Graph(n, std::move(edges), weighted);
  if (pinned_n >= 0) {
    out.ids.labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.ids.labels.push_back(std::to_string(i));
  } else {
    out.ids.labels = std::move(labels);
  }
  return out;
}

LoadedGraph load_graph_string(const std::string& text, bool symmetrize) {
  std::istringstream in(text);
  return load_graph(in, symmetrize);
}

LoadedGraph load_graph_file(const std::filesystem::path& path, bool symmetrize) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file " + path.string());
  return load_graph(in, symmetrize);
}

std::string format_double(double v) {
  if (std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  double back = std::strtod(buf, nullptr);
  if (back == v) {
    // prefer the shortest representation that still round-trips
    for (int prec = 15; prec <= 16; ++prec) {
      char shorter[64];
      std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
      if (std::strtod(shorter, nullptr) == v) return shorter;
    }
  }
  return buf;
}

void write_graph(const Graph& g, std::ostream& out) {
  out << "# nodes " << g.node_count() << "\n";
  for (const auto& e : g.edges()) {
    out << e.u << ' ' << e.v;
    if (g.weighted()) out << ' ' << format_double(e.w);
    out << '\n';
  }
}

std::string write_graph_string(const Graph& g) {
  std::ostringstream out;
  write_graph(g, out);
  return out.str();
}

void write_graph_file(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file " + path.string());
  write_graph(g, out);
}

std::string graph_digest(const Graph& g) { return sha256_hex(write_graph_string(g)); }

Cover load_cover(std::istream& in, int n) {
  std::vector<std::vector<int>> comms;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tok;
    std::vector<int> members;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      long long id;
      if (!parse_int_strict(tok, id))
        throw ParseError("cover line " + std::to_string(lineno) + ": non-numeric node id '" + tok + "'");
      if (id < 0 || id >= n)
        throw ValueError("cover line " + std::to_string(lineno) + ": node id " + tok +
                         " outside 0.." + std::to_string(n - 1));
      members.push_back(static_cast<int>(id));
    }
    if (!members.empty()) comms.push_back(std::move(members));
  }
  return Cover::with_singleton_completion(n, std::move(comms));
}

Cover load_cover_string(const std::string& text, int n) {
  std::istringstream in(text);
  return load_cover(in, n);
}

Cover load_cover_file(const std::filesystem::path& path, int n) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cover file " + path.string());
  return load_cover(in, n);
}

void write_cover(const Cover& c, std::ostream& out) {
  for (const auto& comm : c.communities()) {
    for (std::size_t i = 0; i < comm.size(); ++i) {
      if (i) out << ' ';
      out << comm[i];
    }
    out << '\n';
  }
}

std::string write_cover_string(const Cover& c) {
  std::ostringstream out;
  write_cover(c, out);
  return out.str();
}

void write_cover_file(const Cover& c, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write cover file " + path.string());
  write_cover(c, out);
}

void write_id_map(const IdMap& ids, std::ostream& out) {
  for (std::size_t i = 0; i < ids.labels.size(); ++i)
    out << ids.labels[i] << '\t' << i << '\n';
}

void write_id_map_file(const IdMap& ids, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write id map " + path.string());
  write_id_map(ids, out);
}

IdMap load_id_map(std::istream& in) {
  IdMap ids;
  std::string label;
  long long dense;
  while (in >> label >> dense) {
    if (dense != static_cast<long long>(ids.labels.size()))
      throw ParseError("id map: dense ids must be 0,1,2,...");
    ids.labels.push_back(label);
  }
  return ids;
}

}  // namespace asnkit
