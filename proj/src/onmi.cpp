#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "asnkit/metrics.hpp"

namespace asnkit {

namespace {

double h(double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; }

struct CoverView {
  int n = 0;
  const std::vector<std::vector<int>>* comms = nullptr;
  std::vector<double> entropy;  // H(X_k) = h(p) + h(1-p)

  explicit CoverView(const Cover& c) : n(c.node_count()), comms(&c.communities()) {
    entropy.reserve(comms->size());
    for (const auto& comm : *comms) {
      double p = static_cast<double>(comm.size()) / n;
      entropy.push_back(h(p) + h(1.0 - p));
    }
  }
};

// Pairwise intersection sizes via node membership lists.
std::vector<std::unordered_map<int, int>> intersections(const CoverView& x, const CoverView& y) {
  std::vector<std::vector<int>> member_x(static_cast<std::size_t>(x.n));
  for (std::size_t k = 0; k < x.comms->size(); ++k)
    for (int v : (*x.comms)[k]) member_x[static_cast<std::size_t>(v)].push_back(static_cast<int>(k));
  std::vector<std::unordered_map<int, int>> inter(x.comms->size());
  for (std::size_t l = 0; l < y.comms->size(); ++l)
    for (int v : (*y.comms)[l])
      for (int k : member_x[static_cast<std::size_t>(v)])
        ++inter[static_cast<std::size_t>(k)][static_cast<int>(l)];
  return inter;
}

// H*(X_k|Y): min over admissible counterpart communities of
// H(X_k, Y_l) - H(Y_l), else H(X_k). Admissibility is the LFK guard
// h(P11) + h(P00) >= h(P01) + h(P10).
std::vector<double> conditional_entropies(const CoverView& x, const CoverView& y) {
  auto inter = intersections(x, y);
  std::vector<double> out(x.comms->size());
  double n = static_cast<double>(x.n);
  for (std::size_t k = 0; k < x.comms->size(); ++k) {
    double size_x = static_cast<double>((*x.comms)[k].size());
    double best = x.entropy[k];
    bool any = false;
    for (std::size_t l = 0; l < y.comms->size(); ++l) {
      double size_y = static_cast<double>((*y.comms)[l].size());
      auto it = inter[k].find(static_cast<int>(l));
      double both = it != inter[k].end() ? it->second : 0.0;
      double p11 = both / n;
      double p10 = (size_x - both) / n;
      double p01 = (size_y - both) / n;
      double p00 = 1.0 - p11 - p10 - p01;
      if (p00 < 0.0) p00 = 0.0;
      if (h(p11) + h(p00) < h(p01) + h(p10)) continue;  // anti-complement guard
      double joint = h(p11) + h(p10) + h(p01) + h(p00);
      double hyl = h(size_y / n) + h(1.0 - size_y / n);
      double cond = joint - hyl;
      if (!any || cond < best) best = cond;
      any = true;
    }
    if (!any) best = x.entropy[k];
    out[k] = std::min(best, x.entropy[k]);  // conditioning never increases entropy
    if (out[k] < 0.0) out[k] = 0.0;
  }
  return out;
}

}  // namespace

double onmi(const Cover& xc, const Cover& yc, OnmiVariant variant) {
  if (xc.node_count() != yc.node_count())
    throw ContractError("onmi: covers are over different node counts");
  if (xc.node_count() == 0) throw ValueError("onmi undefined for n = 0");

  CoverView x(xc), y(yc);
  double hx = 0.0, hy = 0.0;
  for (double e : x.entropy) hx += e;
  for (double e : y.entropy) hy += e;
  if (hx == 0.0 && hy == 0.0) {
    // both covers are stacks of all-node communities; identical iff equal
    return xc == yc ? 1.0 : 0.0;
  }

  auto cond_x = conditional_entropies(x, y);
  auto cond_y = conditional_entropies(y, x);

  if (variant == OnmiVariant::LFK) {
    double tx = 0.0;
    for (std::size_t k = 0; k < cond_x.size(); ++k)
      tx += x.entropy[k] > 0.0 ? cond_x[k] / x.entropy[k] : 0.0;
    tx /= static_cast<double>(cond_x.size());
    double ty = 0.0;
    for (std::size_t l = 0; l < cond_y.size(); ++l)
      ty += y.entropy[l] > 0.0 ? cond_y[l] / y.entropy[l] : 0.0;
    ty /= static_cast<double>(cond_y.size());
    return 1.0 - 0.5 * (tx + ty);
  }

  double hx_given_y = 0.0, hy_given_x = 0.0;
  for (double e : cond_x) hx_given_y += e;
  for (double e : cond_y) hy_given_x += e;
  double mi = 0.5 * ((hx - hx_given_y) + (hy - hy_given_x));
  double denom = variant == OnmiVariant::MAX ? std::max(hx, hy) : 0.5 * (hx + hy);
  if (denom == 0.0) return xc == yc ? 1.0 : 0.0;
  double value = mi / denom;
  if (value < 0.0) value = 0.0;
  if (value > 1.0) value = 1.0;
  return value;
}

}  // namespace asnkit
