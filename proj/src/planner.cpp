#include "wansync/planner.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "json.hpp"

namespace wansync {

bool path_beats(const PathCandidate& x, const PathCandidate& y) {
  if (x.delay != y.delay) return x.delay < y.delay;
  if (x.nodes.size() != y.nodes.size()) return x.nodes.size() < y.nodes.size();
  return x.nodes < y.nodes;
}

std::vector<PathCandidate> shortest_paths_from(const OverlayGraph& g, const DelayView& d,
                                               NodeId src) {
  return shortest_paths_from(g, d, src, std::vector<char>(g.links().size(), 1));
}

std::vector<PathCandidate> shortest_paths_from(const OverlayGraph& g, const DelayView& d,
                                               NodeId src, const std::vector<char>& link_alive) {
  const std::uint32_t n = g.node_count();
  if (src >= n) throw std::invalid_argument("source out of range");
  if (link_alive.size() != g.links().size())
    throw std::invalid_argument("link_alive size mismatch");

  struct QueueEntry {
    PathCandidate cand;
    NodeId node;
  };
  auto worse = [](const QueueEntry& a, const QueueEntry& b) {
    return path_beats(b.cand, a.cand);
  };
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, decltype(worse)> pq(worse);

  std::vector<PathCandidate> best(n);
  std::vector<char> has_best(n, 0), settled(n, 0);

  best[src] = PathCandidate{0.0, {src}};
  has_best[src] = 1;
  pq.push({best[src], src});

  while (!pq.empty()) {
    auto [cand, v] = pq.top();
    pq.pop();
    if (settled[v]) continue;
    settled[v] = 1;
    best[v] = cand;
    for (const auto& [nb, link] : g.neighbors(v)) {
      if (!link_alive[link] || settled[nb]) continue;
      PathCandidate ext;
      ext.delay = cand.delay + d.weight(link);
      ext.nodes = cand.nodes;
      ext.nodes.push_back(nb);
      if (!has_best[nb] || path_beats(ext, best[nb])) {
        best[nb] = ext;
        has_best[nb] = 1;
        pq.push({ext, nb});
      }
    }
  }

  std::vector<PathCandidate> out(n);
  for (NodeId v = 0; v < n; ++v)
    if (settled[v]) out[v] = best[v];
  return out;
}

RootSelection find_fastest_paths(const OverlayGraph& g, const DelayView& d,
                                 const std::vector<NodeId>& forced, std::uint32_t n) {
  const std::uint32_t count = g.node_count();
  std::vector<std::vector<PathCandidate>> rows(count);
  std::vector<double> score(count, 0.0);
  for (NodeId v = 0; v < count; ++v) {
    rows[v] = shortest_paths_from(g, d, v);
    double worst = 0.0;
    bool spans = true;
    for (NodeId j = 0; j < count; ++j) {
      if (rows[v][j].nodes.empty()) {
        spans = false;
        break;
      }
      worst = std::max(worst, rows[v][j].delay);
    }
    if (spans && worst > 0) score[v] = 1.0 / worst;
  }

  RootSelection sel;
  sel.paths = FastestPathSet(std::move(rows));

  if (!forced.empty()) {
    std::set<NodeId> seen;
    for (NodeId r : forced) {
      if (r >= count) throw PlanningError("root id out of range");
      if (!seen.insert(r).second) throw PlanningError("duplicate root id");
    }
    sel.roots.roots = forced;
  } else {
    if (n == 0 || n > count) throw PlanningError("root count must be in [1, node count]");
    std::vector<NodeId> order(count);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return a < b;
    });
    for (std::uint32_t i = 0; i < n; ++i) {
      if (score[order[i]] <= 0)
        throw PlanningError("not enough spanning-capable roots (graph disconnected?)");
      sel.roots.roots.push_back(order[i]);
    }
  }
  for (NodeId r : sel.roots.roots) sel.scores[r] = score[r];
  return sel;
}

std::map<NodeId, double> allocate_shares(const std::map<NodeId, double>& scores) {
  double total = 0.0;
  for (const auto& [r, q] : scores) {
    if (q <= 0) throw std::invalid_argument("non-positive quality score");
    total += q;
  }
  if (total <= 0) throw std::invalid_argument("empty score set");
  std::map<NodeId, double> shares;
  for (const auto& [r, q] : scores) shares[r] = q / total;
  return shares;
}

SyncPlan build_plan(const OverlayGraph& g, const DelayView& d,
                    const std::vector<NodeId>& forced_roots, std::uint32_t n,
                    std::uint32_t epoch) {
  RootSelection sel = find_fastest_paths(g, d, forced_roots, n);
  const std::uint32_t count = g.node_count();

  SyncPlan plan;
  plan.epoch = epoch;
  plan.roots = sel.roots;
  for (NodeId r : sel.roots.roots) {
    AggTree t;
    t.root = r;
    t.parent.assign(count, r);
    for (NodeId j = 0; j < count; ++j) {
      if (j == r) continue;
      const PathCandidate& p = sel.paths.path(r, j);
      if (p.nodes.empty())
        throw PlanningError("node " + std::to_string(j) + " unreachable from root " +
                            std::to_string(r));
      // Walking the path outward from the root assigns each hop's parent.
      for (std::size_t i = 1; i < p.nodes.size(); ++i) t.parent[p.nodes[i]] = p.nodes[i - 1];
    }
    validate_tree(t, g);
    double delay = tree_delay(t, g, d);
    plan.trees[r] = std::move(t);
    plan.delays[r] = delay;
    plan.scores[r] = 1.0 / delay;
  }
  plan.shares = allocate_shares(plan.scores);
  return plan;
}

namespace {

SyncPlan finish_baseline(AggTree t, const OverlayGraph& g, const DelayView& d,
                         std::uint32_t epoch) {
  validate_tree(t, g);
  SyncPlan plan;
  plan.epoch = epoch;
  plan.roots.roots = {t.root};
  double delay = tree_delay(t, g, d);
  plan.delays[t.root] = delay;
  plan.scores[t.root] = 1.0 / delay;
  plan.shares[t.root] = 1.0;
  plan.trees[t.root] = std::move(t);
  return plan;
}

// Union-find for the spanning-tree build.
struct Dsu {
  std::vector<NodeId> up;
  explicit Dsu(std::uint32_t n) : up(n) { std::iota(up.begin(), up.end(), 0); }
  NodeId find(NodeId v) { return up[v] == v ? v : up[v] = find(up[v]); }
  bool unite(NodeId a, NodeId b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    up[b] = a;
    return true;
  }
};

}  // namespace

SyncPlan build_baseline(const OverlayGraph& g, const DelayView& d, BaselineKind kind,
                        NodeId root, std::uint32_t fanout, std::uint32_t epoch) {
  const std::uint32_t n = g.node_count();
  if (root >= n) throw PlanningError("baseline root out of range");

  AggTree t;
  t.root = root;
  t.parent.assign(n, root);

  switch (kind) {
    case BaselineKind::Star: {
      for (NodeId v = 0; v < n; ++v) {
        if (v == root) continue;
        if (!g.find_link(v, root))
          throw PlanningError("STAR infeasible: no overlay link " + std::to_string(v) +
                              "-" + std::to_string(root));
      }
      break;
    }
    case BaselineKind::Bkt: {
      if (fanout == 0) throw PlanningError("BKT fanout must be >= 1");
      // Heap layout over [root, others ascending by id]: the parent of
      // sequence position j is position (j-1)/fanout.
      std::vector<NodeId> seq{root};
      for (NodeId v = 0; v < n; ++v)
        if (v != root) seq.push_back(v);
      for (std::size_t j = 1; j < seq.size(); ++j) {
        NodeId p = seq[(j - 1) / fanout];
        if (!g.find_link(seq[j], p))
          throw PlanningError("BKT infeasible: no overlay link " + std::to_string(seq[j]) +
                              "-" + std::to_string(p));
        t.parent[seq[j]] = p;
      }
      break;
    }
    case BaselineKind::Mst: {
      std::vector<LinkId> order(g.links().size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](LinkId a, LinkId b) { return d.weight(a) < d.weight(b); });
      Dsu dsu(n);
      std::vector<std::vector<NodeId>> adj(n);
      std::uint32_t picked = 0;
      for (LinkId id : order) {
        const LinkSpec& l = g.link(id);
        if (dsu.unite(l.a, l.b)) {
          adj[l.a].push_back(l.b);
          adj[l.b].push_back(l.a);
          ++picked;
        }
      }
      if (picked + 1 != n) throw PlanningError("MST infeasible: graph disconnected");
      // Re-root via BFS from the requested root.
      std::vector<char> seen(n, 0);
      std::queue<NodeId> q;
      q.push(root);
      seen[root] = 1;
      while (!q.empty()) {
        NodeId v = q.front();
        q.pop();
        for (NodeId nb : adj[v]) {
          if (!seen[nb]) {
            seen[nb] = 1;
            t.parent[nb] = v;
            q.push(nb);
          }
        }
      }
      break;
    }
  }
  return finish_baseline(std::move(t), g, d, epoch);
}

std::optional<BaselineKind> baseline_kind_from_string(const std::string& s) {
  if (s == "STAR") return BaselineKind::Star;
  if (s == "BKT") return BaselineKind::Bkt;
  if (s == "MST") return BaselineKind::Mst;
  return std::nullopt;
}

std::string plan_to_json(const SyncPlan& plan) {
  nlohmann::json j;
  j["epoch"] = plan.epoch;
  j["roots"] = plan.roots.roots;
  for (const auto& [r, tree] : plan.trees) {
    nlohmann::json jt;
    jt["root"] = tree.root;
    jt["parent"] = tree.parent;
    jt["delay"] = plan.delays.at(r);
    jt["score"] = plan.scores.at(r);
    jt["share"] = plan.shares.at(r);
    j["trees"][std::to_string(r)] = std::move(jt);
  }
  return j.dump(2);
}

}  // namespace wansync
