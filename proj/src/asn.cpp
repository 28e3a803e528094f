#include "asnkit/asn.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace asnkit {

int SimilarityMatrix::index_of(const std::string& id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it != ids.end() && *it == id) return static_cast<int>(it - ids.begin());
  return -1;
}

void SimilarityMatrix::validate() const {
  if (!std::is_sorted(ids.begin(), ids.end()))
    throw ValueError("similarity matrix: ids must be sorted");
  if (sim.size() != ids.size()) throw ValueError("similarity matrix: row count mismatch");
  for (std::size_t i = 0; i < sim.size(); ++i) {
    if (sim[i].size() != ids.size()) throw ValueError("similarity matrix: column count mismatch");
    for (std::size_t j = 0; j < sim.size(); ++j) {
      double v = sim[i][j];
      if (!(v >= 0.0 && v <= 1.0))
        throw ValueError("similarity matrix: value outside [0,1]");
      if (sim[j][i] != v) throw ValueError("similarity matrix: asymmetric");
    }
    if (std::fabs(sim[i][i] - 1.0) > 1e-12)
      throw ValueError("similarity matrix: diagonal must be 1");
  }
}

AsnNet::AsnNet(std::vector<std::string> nodes, std::vector<AsnEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)) {
  if (!std::is_sorted(nodes_.begin(), nodes_.end()) ||
      std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
    throw ValueError("asn: node ids must be sorted and unique");
  for (auto& e : edges_) {
    if (e.a > e.b) std::swap(e.a, e.b);
    if (e.a == e.b || e.a < 0 || e.b >= static_cast<int>(nodes_.size()))
      throw ValueError("asn: edge endpoints out of range");
    if (e.weight < 0.0) throw ValueError("asn: negative edge weight");
  }
  std::sort(edges_.begin(), edges_.end(), [](const AsnEdge& x, const AsnEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (edges_[i - 1].a == edges_[i].a && edges_[i - 1].b == edges_[i].b)
      throw ValueError("asn: duplicate edge");
}

int AsnNet::index_of(const std::string& id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
  if (it != nodes_.end() && *it == id) return static_cast<int>(it - nodes_.begin());
  return -1;
}

double AsnNet::weight(const std::string& a, const std::string& b) const {
  int ia = index_of(a), ib = index_of(b);
  if (ia < 0 || ib < 0) return 0.0;
  if (ia > ib) std::swap(ia, ib);
  for (const auto& e : edges_)
    if (e.a == ia && e.b == ib) return e.weight;
  return 0.0;
}

int AsnNet::min_degree() const {
  if (nodes_.empty()) return 0;
  std::vector<int> deg(nodes_.size(), 0);
  for (const auto& e : edges_) {
    ++deg[static_cast<std::size_t>(e.a)];
    ++deg[static_cast<std::size_t>(e.b)];
  }
  return *std::min_element(deg.begin(), deg.end());
}

Graph AsnNet::to_graph() const {
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (const auto& e : edges_)
    if (e.weight > 0.0) edges.push_back({e.a, e.b, e.weight});
  return Graph(static_cast<int>(nodes_.size()), std::move(edges), true);
}

std::set<std::pair<int, int>> mutual_topk(const SimilarityMatrix& m, int k) {
  if (k < 1) throw ValueError("mutual_topk: k must be >= 1");
  int n = static_cast<int>(m.ids.size());
  if (n < 2) return {};
  // per algorithm: the similarity threshold of rank k among its peers
  std::vector<double> cutoff(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::vector<double> peer;
    peer.reserve(static_cast<std::size_t>(n) - 1);
    for (int j = 0; j < n; ++j)
      if (j != i) peer.push_back(m.sim[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    std::sort(peer.begin(), peer.end(), std::greater<>());
    std::size_t rank = std::min<std::size_t>(static_cast<std::size_t>(k), peer.size());
    cutoff[static_cast<std::size_t>(i)] = peer[rank - 1];
  }
  std::set<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double s = m.sim[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (s >= cutoff[static_cast<std::size_t>(i)] && s >= cutoff[static_cast<std::size_t>(j)])
        out.emplace(i, j);
    }
  return out;
}

namespace {

// Restrict a matrix to a subset of its ids (and optionally drop the
// ground-truth row).
SimilarityMatrix restrict_matrix(const SimilarityMatrix& m, bool keep_gt,
                                 const std::set<std::string>* subset) {
  std::vector<int> keep;
  for (int i = 0; i < static_cast<int>(m.ids.size()); ++i) {
    const auto& id = m.ids[static_cast<std::size_t>(i)];
    if (!keep_gt && id == kGroundTruthId) continue;
    if (subset && !subset->count(id)) continue;
    keep.push_back(i);
  }
  SimilarityMatrix out;
  for (int i : keep) out.ids.push_back(m.ids[static_cast<std::size_t>(i)]);
  out.sim.assign(keep.size(), std::vector<double>(keep.size(), 0.0));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      out.sim[a][b] = m.sim[static_cast<std::size_t>(keep[a])][static_cast<std::size_t>(keep[b])];
  return out;
}

std::vector<std::string> collect_nodes(const SimilarityStore& stores, bool keep_gt,
                                       const std::set<std::string>* subset) {
  std::set<std::string> ids;
  for (const auto& [net, m] : stores)
    for (const auto& id : m.ids) {
      if (!keep_gt && id == kGroundTruthId) continue;
      if (subset && !subset->count(id)) continue;
      ids.insert(id);
    }
  return {ids.begin(), ids.end()};
}

AsnNet from_pair_weights(std::vector<std::string> nodes,
                         const std::map<std::pair<int, int>, double>& weights) {
  std::vector<AsnEdge> edges;
  edges.reserve(weights.size());
  for (const auto& [pair, w] : weights)
    if (w > 0.0) edges.push_back({pair.first, pair.second, w, 0.0});
  return AsnNet(std::move(nodes), std::move(edges));
}

}  // namespace

AsnNet accumulate(const SimilarityStore& stores, const AccumulateOptions& opts) {
  if (stores.empty()) throw ValueError("accumulate: no benchmarks");
  auto nodes = collect_nodes(stores, opts.include_ground_truth, opts.restrict_to);
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index[nodes[static_cast<std::size_t>(i)]] = i;

  std::map<std::pair<int, int>, double> weights;
  for (const auto& [net_id, matrix] : stores) {
    SimilarityMatrix m = restrict_matrix(matrix, opts.include_ground_truth, opts.restrict_to);
    for (auto [i, j] : mutual_topk(m, opts.k)) {
      int a = index[m.ids[static_cast<std::size_t>(i)]];
      int b = index[m.ids[static_cast<std::size_t>(j)]];
      if (a > b) std::swap(a, b);
      weights[{a, b}] += 1.0;
    }
  }
  return from_pair_weights(std::move(nodes), weights);
}

AsnNet aggregate_average(const SimilarityStore& stores) {
  if (stores.empty()) throw ValueError("aggregate_average: no benchmarks");
  auto nodes = collect_nodes(stores, false, nullptr);
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index[nodes[static_cast<std::size_t>(i)]] = i;
  std::map<std::pair<int, int>, double> sum;
  std::map<std::pair<int, int>, double> count;
  for (const auto& [net_id, matrix] : stores) {
    SimilarityMatrix m = restrict_matrix(matrix, false, nullptr);
    for (std::size_t i = 0; i < m.ids.size(); ++i)
      for (std::size_t j = i + 1; j < m.ids.size(); ++j) {
        int a = index[m.ids[i]], b = index[m.ids[j]];
        if (a > b) std::swap(a, b);
        sum[{a, b}] += m.sim[i][j];
        count[{a, b}] += 1.0;
      }
  }
  std::map<std::pair<int, int>, double> avg;
  for (const auto& [pair, s] : sum) avg[pair] = s / count[pair];
  return from_pair_weights(std::move(nodes), avg);
}

AsnNet aggregate_threshold(const SimilarityStore& stores, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw ValueError("aggregate_threshold: tau must be in [0,1]");
  if (stores.empty()) throw ValueError("aggregate_threshold: no benchmarks");
  auto nodes = collect_nodes(stores, false, nullptr);
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index[nodes[static_cast<std::size_t>(i)]] = i;
  std::map<std::pair<int, int>, double> counts;
  for (const auto& [net_id, matrix] : stores) {
    SimilarityMatrix m = restrict_matrix(matrix, false, nullptr);
    for (std::size_t i = 0; i < m.ids.size(); ++i)
      for (std::size_t j = i + 1; j < m.ids.size(); ++j)
        if (m.sim[i][j] > tau) {
          int a = index[m.ids[i]], b = index[m.ids[j]];
          if (a > b) std::swap(a, b);
          counts[{a, b}] += 1.0;
        }
  }
  return from_pair_weights(std::move(nodes), counts);
}

AsnNet nc_score(const AsnNet& net) {
  double total = 0.0;
  std::vector<double> strength(net.nodes().size(), 0.0);
  for (const auto& e : net.edges()) {
    strength[static_cast<std::size_t>(e.a)] += e.weight;
    strength[static_cast<std::size_t>(e.b)] += e.weight;
    total += e.weight;
  }
  if (!(total > 0.0)) throw ValueError("nc_score: total weight is zero");
  double tstar = 2.0 * total;  // sum of node strengths

  AsnNet out = net;
  for (auto& e : out.mutable_edges()) {
    double sa = strength[static_cast<std::size_t>(e.a)];
    double sb = strength[static_cast<std::size_t>(e.b)];
    double expect = sa * sb / tstar;
    double variance = expect * (1.0 - sa / tstar) * (tstar - sb) / (tstar - 1.0);
    if (variance < 0.0) variance = 0.0;
    e.score = (e.weight - expect) / std::sqrt(variance + 1.0);
  }
  out.set_scored(true);
  return out;
}

double select_delta(const AsnNet& scored) {
  if (!scored.scored()) throw ContractError("select_delta: net has no scores (run nc_score)");
  if (scored.nodes().empty()) throw ContractError("select_delta: empty net");
  std::vector<double> best(scored.nodes().size(), -std::numeric_limits<double>::infinity());
  for (const auto& e : scored.edges()) {
    best[static_cast<std::size_t>(e.a)] = std::max(best[static_cast<std::size_t>(e.a)], e.score);
    best[static_cast<std::size_t>(e.b)] = std::max(best[static_cast<std::size_t>(e.b)], e.score);
  }
  double delta = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < best.size(); ++v) {
    if (std::isinf(best[v]) && best[v] < 0)
      throw ContractError("select_delta: node '" + scored.nodes()[v] + "' has no incident edge");
    delta = std::min(delta, best[v]);
  }
  return delta;
}

AsnNet backbone(const AsnNet& scored, double delta, bool* isolated_warning) {
  if (!scored.scored()) throw ContractError("backbone: net has no scores (run nc_score)");
  std::vector<AsnEdge> kept;
  for (const auto& e : scored.edges())
    if (e.score >= delta) kept.push_back(e);
  AsnNet out(scored.nodes(), std::move(kept));
  out.set_scored(true);
  out.set_delta(delta);
  if (isolated_warning) *isolated_warning = !out.nodes().empty() && out.min_degree() < 1;
  return out;
}

AsnNet sub_asn(const SimilarityStore& stores, const std::set<std::string>& subset, int k) {
  if (subset.size() < 2) throw ValueError("sub_asn: subset must contain at least 2 algorithms");
  std::set<std::string> present;
  for (const auto& [net_id, m] : stores)
    for (const auto& id : m.ids) present.insert(id);
  for (const auto& id : subset)
    if (!present.count(id))
      throw ValueError("sub_asn: algorithm '" + id + "' absent from every benchmark");
  AccumulateOptions opts;
  opts.k = k;
  opts.restrict_to = &subset;
  return nc_score(accumulate(stores, opts));
}

void write_asn_csv(const AsnNet& net, std::ostream& out) {
  out << "src_id,dst_id,weight,nc_score\n";
  for (const auto& e : net.edges()) {
    out << net.nodes()[static_cast<std::size_t>(e.a)] << ','
        << net.nodes()[static_cast<std::size_t>(e.b)] << ',' << format_double(e.weight) << ','
        << (net.scored() ? format_double(e.score) : std::string()) << '\n';
  }
}

AsnNet read_asn_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("asn csv: empty input");
  std::set<std::string> ids;
  struct Row {
    std::string a, b;
    double w, s;
    bool scored;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, w, s;
    if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, w, ','))
      throw ParseError("asn csv: malformed row '" + line + "'");
    std::getline(ls, s, ',');
    Row row{a, b, std::stod(w), s.empty() ? 0.0 : std::stod(s), !s.empty()};
    ids.insert(a);
    ids.insert(b);
    rows.push_back(std::move(row));
  }
  std::vector<std::string> nodes(ids.begin(), ids.end());
  std::map<std::string, int> index;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) index[nodes[static_cast<std::size_t>(i)]] = i;
  std::vector<AsnEdge> edges;
  bool scored = !rows.empty();
  for (const auto& r : rows) {
    edges.push_back({index[r.a], index[r.b], r.w, r.s});
    scored = scored && r.scored;
  }
  AsnNet net(std::move(nodes), std::move(edges));
  net.set_scored(scored);
  return net;
}

void write_matrix_csv(const SimilarityMatrix& m, std::ostream& out) {
  out << "id";
  for (const auto& id : m.ids) out << ',' << id;
  out << '\n';
  for (std::size_t i = 0; i < m.ids.size(); ++i) {
    out << m.ids[i];
    for (std::size_t j = 0; j < m.ids.size(); ++j) out << ',' << format_double(m.sim[i][j]);
    out << '\n';
  }
}

SimilarityMatrix read_matrix_csv(std::istream& in) {
  SimilarityMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("matrix csv: empty input");
  {
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');  // "id"
    while (std::getline(ls, tok, ',')) m.ids.push_back(tok);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::getline(ls, tok, ',');
    std::vector<double> row;
    while (std::getline(ls, tok, ',')) row.push_back(std::stod(tok));
    if (row.size() != m.ids.size()) throw ParseError("matrix csv: ragged row");
    m.sim.push_back(std::move(row));
  }
  m.validate();
  return m;
}

}  // namespace asnkit
