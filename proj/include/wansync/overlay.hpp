#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wansync {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;  // index into OverlayGraph::links()

// One segment of a piecewise-constant rate schedule. Rates are in
// data units (model parameters) per second. A segment is active on
// [start_time, next.start_time): the new rate applies at the boundary.
struct RatePoint {
  double start_time = 0.0;  // seconds
  double rate = 0.0;        // units/second, must be > 0

  bool operator==(const RatePoint&) const = default;
};

struct LinkSpec {
  NodeId a = 0;
  NodeId b = 0;                          // unordered endpoints, a != b
  std::vector<RatePoint> rate_schedule;  // first segment starts at 0, times strictly increasing
  double latency = 0.0;                  // one-way propagation, seconds
  double loss_rate = 0.0;                // [0, 1)

  bool operator==(const LinkSpec&) const = default;
};

// Rate in effect at time t. Both directions of a link have this full
// capacity independently.
double rate_at(const std::vector<RatePoint>& schedule, double t);

// Immutable undirected overlay. Validation happens at construction;
// connectivity is queryable, not assumed.
class OverlayGraph {
 public:
  OverlayGraph() = default;
  OverlayGraph(std::uint32_t node_count, std::vector<LinkSpec> links);

  std::uint32_t node_count() const { return node_count_; }
  const std::vector<LinkSpec>& links() const { return links_; }
  const LinkSpec& link(LinkId id) const { return links_.at(id); }

  // Neighbors of v as (neighbor, link id), ascending by neighbor id.
  const std::vector<std::pair<NodeId, LinkId>>& neighbors(NodeId v) const;

  std::optional<LinkId> find_link(NodeId a, NodeId b) const;
  double throughput_at(LinkId id, double t) const;
  double throughput_at(NodeId a, NodeId b, double t) const;  // throws if no such link

  bool is_connected() const;

  bool operator==(const OverlayGraph& o) const {
    return node_count_ == o.node_count_ && links_ == o.links_;
  }

 private:
  std::uint32_t node_count_ = 0;
  std::vector<LinkSpec> links_;
  std::vector<std::vector<std::pair<NodeId, LinkId>>> adj_;
};

// Per-link transfer delay snapshot: weight(e) = seconds per data unit.
// Obtained either from the true rates at a given time or directly from
// externally supplied weights (e.g. measured-throughput reciprocals).
class DelayView {
 public:
  DelayView() = default;

  static DelayView at_time(const OverlayGraph& g, double t);
  static DelayView from_weights(std::vector<double> weights);
  static DelayView from_rates(const std::vector<double>& rates);

  double weight(LinkId id) const { return weights_.at(id); }
  std::size_t size() const { return weights_.size(); }

 private:
  std::vector<double> weights_;
};

}  // namespace wansync
