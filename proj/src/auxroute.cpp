#include "wansync/auxroute.hpp"

#include <algorithm>
#include <numeric>

namespace wansync {

namespace {

double total_delay(const std::vector<NodeId>& path, const OverlayGraph& g,
                   const DelayView& d) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    sum += d.weight(*g.find_link(path[i], path[i + 1]));
  return sum;
}

}  // namespace

AuxRouteTable search_aux_paths(const OverlayGraph& g, const DelayView& d,
                               std::uint32_t max_paths_per_pair) {
  const std::uint32_t n = g.node_count();
  AuxRouteTable table(n);
  std::vector<char> alive(g.links().size(), 1);
  std::size_t alive_count = g.links().size();

  while (alive_count > 0) {
    // Fresh all-pairs fastest paths on the residual.
    std::vector<std::vector<PathCandidate>> rows(n);
    for (NodeId v = 0; v < n; ++v) rows[v] = shortest_paths_from(g, d, v, alive);

    bool removed_any = false;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto& nodes = rows[i][j].nodes;
        if (nodes.empty()) continue;
        if (max_paths_per_pair > 0 && table.paths(i, j).size() >= max_paths_per_pair)
          continue;
        // A link may have been consumed by an earlier pair this round;
        // the pair then waits for the next round's recomputation.
        bool valid = true;
        for (std::size_t k = 0; k + 1 < nodes.size() && valid; ++k)
          valid = alive[*g.find_link(nodes[k], nodes[k + 1])];
        if (!valid) continue;
        for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
          LinkId id = *g.find_link(nodes[k], nodes[k + 1]);
          alive[id] = 0;
          --alive_count;
        }
        table.append(i, j, nodes);
        removed_any = true;
      }
    }
    if (!removed_any) break;  // remaining links unreachable by any pair cap
  }
  return table;
}

std::vector<std::vector<NodeId>> rank_paths(std::vector<std::vector<NodeId>> paths,
                                            const OverlayGraph& g, const DelayView& d) {
  std::vector<std::size_t> order(paths.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> delay(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) delay[i] = total_delay(paths[i], g, d);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (delay[a] != delay[b]) return delay[a] < delay[b];
    return paths[a].size() < paths[b].size();
  });
  std::vector<std::vector<NodeId>> out;
  out.reserve(paths.size());
  for (std::size_t i : order) out.push_back(std::move(paths[i]));
  return out;
}

}  // namespace wansync
