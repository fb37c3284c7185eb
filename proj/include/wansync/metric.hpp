#pragma once

#include <map>
#include <vector>

#include "wansync/overlay.hpp"

namespace wansync {

// Spanning aggregation tree: parent[v] gives the next hop toward the
// root; parent[root] == root. Every tree edge must be an overlay link.
struct AggTree {
  NodeId root = 0;
  std::vector<NodeId> parent;

  bool operator==(const AggTree&) const = default;
};

// Throws std::invalid_argument if the parent map is not a spanning tree
// over g's node set or uses an edge absent from g.
void validate_tree(const AggTree& t, const OverlayGraph& g);

// children[v] ascending by id.
std::vector<std::vector<NodeId>> children_of(const AggTree& t);

// Bottom-up subtree completion bounds: out[v] is the worst cumulative
// per-unit transfer delay from any leaf of v's subtree up to v
// (0 for leaves). The root entry is the tree's synchronization delay.
std::vector<double> subtree_delays(const AggTree& t, const OverlayGraph& g,
                                   const DelayView& d);

// Per-unit synchronization delay of the whole tree: max over leaf-to-root
// paths of the sum of per-link transfer delays.
double tree_delay(const AggTree& t, const OverlayGraph& g, const DelayView& d);

struct PathDelayBreakdown {
  double transfer = 0.0;  // sum of link weights along the path
  double blockage = 0.0;  // sum of supplied per-node blockage over non-source nodes
  double total() const { return transfer + blockage; }
};

// path is a node sequence; every consecutive pair must be an overlay link.
// blockage supplies optional per-node queueing delay, charged at every
// node after the first.
PathDelayBreakdown path_delay(const std::vector<NodeId>& path, const OverlayGraph& g,
                              const DelayView& d,
                              const std::map<NodeId, double>& blockage = {});

// Root quality: reciprocal of the tree's synchronization delay.
double quality_score(const AggTree& t, const OverlayGraph& g, const DelayView& d);

}  // namespace wansync
