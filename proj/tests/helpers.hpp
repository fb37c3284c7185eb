// Shared test utilities: deterministic random fixtures and brute-force
// oracles the production code is checked against.
#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "wansync/metric.hpp"
#include "wansync/overlay.hpp"
#include "wansync/planner.hpp"
#include "wansync/scenario.hpp"

namespace testutil {

using namespace wansync;

inline LinkSpec flat_link(NodeId a, NodeId b, double rate, double latency = 0.0,
                          double loss = 0.0) {
  return LinkSpec{a, b, {{0.0, rate}}, latency, loss};
}

struct WeightedGraph {
  OverlayGraph g;
  DelayView d;                 // weights as given (integers stored exactly)
  std::vector<double> weights; // per link
};

// Connected graph: a random spanning tree plus `extra` distinct edges,
// positive integer weights in [1, max_w].
inline WeightedGraph random_graph(std::mt19937_64& rng, std::uint32_t n, std::uint32_t extra,
                                  int max_w) {
  std::vector<NodeId> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);

  std::set<std::pair<NodeId, NodeId>> used;
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (std::uint32_t i = 1; i < n; ++i) {
    NodeId a = order[i];
    NodeId b = order[rng() % i];
    auto key = std::minmax(a, b);
    used.insert(key);
    edges.push_back(key);
  }
  std::uint32_t attempts = 0;
  while (extra > 0 && attempts < 200) {
    NodeId a = static_cast<NodeId>(rng() % n);
    NodeId b = static_cast<NodeId>(rng() % n);
    ++attempts;
    if (a == b) continue;
    auto key = std::minmax(a, b);
    if (used.count(key)) continue;
    used.insert(key);
    edges.push_back(key);
    --extra;
  }

  WeightedGraph out;
  std::vector<LinkSpec> links;
  for (auto [a, b] : edges) {
    double w = 1.0 + static_cast<double>(rng() % max_w);
    out.weights.push_back(w);
    links.push_back(flat_link(a, b, 1.0 / w));
  }
  out.g = OverlayGraph(n, links);
  out.d = DelayView::from_weights(out.weights);
  return out;
}

// Minimum, over every spanning tree of g, of the tree synchronization
// delay rooted at each node. Enumerates all C(m, n-1) edge subsets, so
// keep graphs small and sparse.
inline std::vector<double> brute_force_best_delays(const OverlayGraph& g, const DelayView& d) {
  const std::uint32_t n = g.node_count();
  const std::uint32_t m = static_cast<std::uint32_t>(g.links().size());
  std::vector<double> best(n, -1.0);

  std::vector<std::uint32_t> pick(n - 1);
  std::iota(pick.begin(), pick.end(), 0);

  auto advance = [&]() -> bool {
    int i = static_cast<int>(pick.size()) - 1;
    while (i >= 0 && pick[i] == m - (pick.size() - i)) --i;
    if (i < 0) return false;
    ++pick[i];
    for (std::size_t j = i + 1; j < pick.size(); ++j) pick[j] = pick[j - 1] + 1;
    return true;
  };

  if (n - 1 > m) return best;
  do {
    // Union-find spanning check.
    std::vector<NodeId> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](NodeId x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool ok = true;
    for (std::uint32_t e : pick) {
      NodeId ra = find(g.link(e).a), rb = find(g.link(e).b);
      if (ra == rb) {
        ok = false;
        break;
      }
      parent[ra] = rb;
    }
    if (!ok) continue;

    std::vector<std::vector<std::pair<NodeId, double>>> adj(n);
    for (std::uint32_t e : pick) {
      adj[g.link(e).a].push_back({g.link(e).b, d.weight(e)});
      adj[g.link(e).b].push_back({g.link(e).a, d.weight(e)});
    }
    for (NodeId r = 0; r < n; ++r) {
      // Max cumulative weight from r to any node = worst leaf-to-root path.
      std::vector<double> dist(n, -1.0);
      std::vector<NodeId> stack{r};
      dist[r] = 0.0;
      double worst = 0.0;
      while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (auto [u, w] : adj[v]) {
          if (dist[u] >= 0) continue;
          dist[u] = dist[v] + w;
          worst = std::max(worst, dist[u]);
          stack.push_back(u);
        }
      }
      if (best[r] < 0 || worst < best[r]) best[r] = worst;
    }
  } while (advance());
  return best;
}

// Random spanning tree of g rooted at `root` (randomized Prim).
inline AggTree random_spanning_tree(std::mt19937_64& rng, const OverlayGraph& g, NodeId root) {
  const std::uint32_t n = g.node_count();
  AggTree t;
  t.root = root;
  t.parent.assign(n, root);
  std::vector<char> in_tree(n, 0);
  in_tree[root] = 1;
  std::vector<std::pair<NodeId, NodeId>> frontier;  // (tree node, outside node)
  auto grow = [&](NodeId v) {
    for (auto [u, link] : g.neighbors(v)) {
      (void)link;
      if (!in_tree[u]) frontier.push_back({v, u});
    }
  };
  grow(root);
  std::uint32_t added = 1;
  while (added < n) {
    std::size_t i = rng() % frontier.size();
    auto [v, u] = frontier[i];
    frontier.erase(frontier.begin() + i);
    if (in_tree[u]) continue;
    in_tree[u] = 1;
    t.parent[u] = v;
    ++added;
    grow(u);
  }
  return t;
}

// Scenario wrapper with zeroed clocks and default hyperparameters.
inline Scenario make_scenario(OverlayGraph g, std::vector<TensorSpec> tensors) {
  Scenario sc;
  sc.clock_offset.assign(g.node_count(), 0.0);
  sc.clock_skew.assign(g.node_count(), 0.0);
  sc.graph = std::move(g);
  sc.tensors = std::move(tensors);
  return sc;
}

// Single-root plan around an explicit tree, shares pinned to 1.
inline SyncPlan fixed_tree_plan(const OverlayGraph& g, const DelayView& d, const AggTree& t) {
  SyncPlan plan;
  plan.epoch = 1;
  plan.roots.roots = {t.root};
  plan.trees[t.root] = t;
  plan.delays[t.root] = tree_delay(t, g, d);
  plan.scores[t.root] = 1.0 / plan.delays[t.root];
  plan.shares[t.root] = 1.0;
  return plan;
}

}  // namespace testutil
