#include "wansync/metric.hpp"

#include <algorithm>

namespace wansync {

void validate_tree(const AggTree& t, const OverlayGraph& g) {
  const std::size_t n = g.node_count();
  if (t.parent.size() != n) throw std::invalid_argument("parent map size != node count");
  if (t.root >= n) throw std::invalid_argument("tree root out of range");
  if (t.parent[t.root] != t.root) throw std::invalid_argument("root must be its own parent");
  for (NodeId v = 0; v < n; ++v) {
    if (v == t.root) continue;
    if (t.parent[v] >= n) throw std::invalid_argument("parent out of range");
    if (t.parent[v] == v) throw std::invalid_argument("non-root node is its own parent");
    if (!g.find_link(v, t.parent[v]))
      throw std::invalid_argument("tree edge is not an overlay link");
  }
  // Every node must reach the root without cycles.
  for (NodeId v = 0; v < n; ++v) {
    NodeId cur = v;
    for (std::size_t steps = 0; cur != t.root; ++steps) {
      if (steps > n) throw std::invalid_argument("cycle in parent map");
      cur = t.parent[cur];
    }
  }
}

std::vector<std::vector<NodeId>> children_of(const AggTree& t) {
  std::vector<std::vector<NodeId>> ch(t.parent.size());
  for (NodeId v = 0; v < t.parent.size(); ++v)
    if (v != t.root) ch[t.parent[v]].push_back(v);
  return ch;
}

std::vector<double> subtree_delays(const AggTree& t, const OverlayGraph& g,
                                   const DelayView& d) {
  validate_tree(t, g);
  auto ch = children_of(t);
  std::vector<double> out(t.parent.size(), 0.0);
  // Nodes ordered by decreasing depth so children resolve before parents.
  std::vector<NodeId> order;
  order.reserve(t.parent.size());
  std::vector<NodeId> stack{t.root};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    order.push_back(v);
    for (NodeId c : ch[v]) stack.push_back(c);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId v = *it;
    double worst = 0.0;
    for (NodeId c : ch[v]) {
      double w = d.weight(*g.find_link(c, v));
      worst = std::max(worst, out[c] + w);
    }
    out[v] = worst;
  }
  return out;
}

double tree_delay(const AggTree& t, const OverlayGraph& g, const DelayView& d) {
  return subtree_delays(t, g, d)[t.root];
}

PathDelayBreakdown path_delay(const std::vector<NodeId>& path, const OverlayGraph& g,
                              const DelayView& d,
                              const std::map<NodeId, double>& blockage) {
  if (path.size() < 2) throw std::invalid_argument("path needs at least two nodes");
  PathDelayBreakdown out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto id = g.find_link(path[i], path[i + 1]);
    if (!id) throw std::invalid_argument("path step is not an overlay link");
    out.transfer += d.weight(*id);
  }
  for (std::size_t i = 1; i < path.size(); ++i) {
    auto it = blockage.find(path[i]);
    if (it != blockage.end()) out.blockage += it->second;
  }
  return out;
}

double quality_score(const AggTree& t, const OverlayGraph& g, const DelayView& d) {
  double delay = tree_delay(t, g, d);
  if (delay <= 0) throw std::invalid_argument("degenerate tree delay");
  return 1.0 / delay;
}

}  // namespace wansync
