#pragma once

#include <map>
#include <utility>
#include <vector>

#include "wansync/overlay.hpp"
#include "wansync/planner.hpp"

namespace wansync {

// Per ordered node pair: candidate paths, fastest first. Within a pair
// the paths are pairwise edge-disjoint; the first entry doubles as the
// pair's primary route.
class AuxRouteTable {
 public:
  using PathList = std::vector<std::vector<NodeId>>;

  AuxRouteTable() = default;
  explicit AuxRouteTable(std::uint32_t node_count) : node_count_(node_count) {}

  std::uint32_t node_count() const { return node_count_; }

  const PathList& paths(NodeId from, NodeId to) const {
    static const PathList kEmpty;
    auto it = table_.find({from, to});
    return it == table_.end() ? kEmpty : it->second;
  }

  void append(NodeId from, NodeId to, std::vector<NodeId> path) {
    table_[{from, to}].push_back(std::move(path));
  }

  const std::map<std::pair<NodeId, NodeId>, PathList>& all() const { return table_; }

  bool operator==(const AuxRouteTable&) const = default;

 private:
  std::uint32_t node_count_ = 0;
  std::map<std::pair<NodeId, NodeId>, PathList> table_;
};

// Iterative exclusionary search: repeatedly run all-pairs fastest paths
// on the residual graph, hand each ordered pair its current path, then
// delete those paths' links from the residual and start another round
// (pairs whose cached path lost a link earlier in the round are skipped
// until the next round). Stops when no residual links remain, so every
// overlay link appears in some path. max_paths_per_pair caps the list
// lengths (0 = unlimited).
AuxRouteTable search_aux_paths(const OverlayGraph& g, const DelayView& d,
                               std::uint32_t max_paths_per_pair = 0);

// Fastest-first ordering of a path list under the given snapshot: by
// total transfer delay, then fewer hops; equal candidates keep their
// original order.
std::vector<std::vector<NodeId>> rank_paths(std::vector<std::vector<NodeId>> paths,
                                            const OverlayGraph& g, const DelayView& d);

}  // namespace wansync
