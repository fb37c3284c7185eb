#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wansync/metric.hpp"
#include "wansync/overlay.hpp"

namespace wansync {

struct PlanningError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Candidate path under a delay snapshot. Total order for tie-breaking:
// smaller delay, then fewer hops, then lexicographically smaller node
// sequence. This makes every planning result deterministic.
struct PathCandidate {
  double delay = 0.0;
  std::vector<NodeId> nodes;  // source .. destination

  std::uint32_t hops() const { return nodes.empty() ? 0 : static_cast<std::uint32_t>(nodes.size() - 1); }
};

bool path_beats(const PathCandidate& x, const PathCandidate& y);

// Single-source fastest paths; out[dst] is empty for unreachable nodes
// and contains {src} for dst == src. link_alive restricts the search to
// a subset of links (used by the residual-graph route search).
std::vector<PathCandidate> shortest_paths_from(const OverlayGraph& g, const DelayView& d,
                                               NodeId src);
std::vector<PathCandidate> shortest_paths_from(const OverlayGraph& g, const DelayView& d,
                                               NodeId src, const std::vector<char>& link_alive);

// Roots ordered by descending quality score (ties to the lower id).
struct RootSet {
  std::vector<NodeId> roots;

  bool operator==(const RootSet&) const = default;
};

// All-pairs fastest paths: path(i, j) as a node sequence from i to j.
class FastestPathSet {
 public:
  FastestPathSet() = default;
  explicit FastestPathSet(std::vector<std::vector<PathCandidate>> rows) : rows_(std::move(rows)) {}

  const PathCandidate& path(NodeId i, NodeId j) const { return rows_.at(i).at(j); }
  std::uint32_t node_count() const { return static_cast<std::uint32_t>(rows_.size()); }

 private:
  std::vector<std::vector<PathCandidate>> rows_;
};

struct RootSelection {
  RootSet roots;
  FastestPathSet paths;
  std::map<NodeId, double> scores;  // per selected root: 1 / tree delay of its fastest-path tree
};

// If `forced` is non-empty those roots are kept (scores still computed);
// otherwise picks the n best-scoring nodes. A node whose fastest-path
// tree cannot reach every other node scores 0 and is never selected.
RootSelection find_fastest_paths(const OverlayGraph& g, const DelayView& d,
                                 const std::vector<NodeId>& forced, std::uint32_t n);

struct SyncPlan {
  std::uint32_t epoch = 0;
  RootSet roots;
  std::map<NodeId, AggTree> trees;     // per root
  std::map<NodeId, double> delays;     // per root: tree synchronization delay
  std::map<NodeId, double> scores;     // per root: 1 / delay
  std::map<NodeId, double> shares;     // per root: chunk share, sums to 1

  bool operator==(const SyncPlan&) const = default;
};

// shares[i] = scores[i] / sum(scores).
std::map<NodeId, double> allocate_shares(const std::map<NodeId, double>& scores);

// Builds one fastest-path tree per root by overlaying root-to-node paths.
// Throws PlanningError when some node is unreachable from a root.
SyncPlan build_plan(const OverlayGraph& g, const DelayView& d,
                    const std::vector<NodeId>& forced_roots, std::uint32_t n,
                    std::uint32_t epoch);

enum class BaselineKind { Star, Bkt, Mst };

// Single-root reference topologies, all constrained to overlay links:
//  Star: every node a direct child of the root
//  Bkt:  balanced k-way tree over nodes ordered by id
//  Mst:  minimum spanning tree under the delay snapshot, re-rooted
// Throws PlanningError when a required link is missing.
SyncPlan build_baseline(const OverlayGraph& g, const DelayView& d, BaselineKind kind,
                        NodeId root, std::uint32_t fanout, std::uint32_t epoch);

std::optional<BaselineKind> baseline_kind_from_string(const std::string& s);

// JSON dump of a plan (trees, delays, scores, shares, epoch).
std::string plan_to_json(const SyncPlan& plan);

}  // namespace wansync
