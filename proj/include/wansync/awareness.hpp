#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "wansync/config.hpp"
#include "wansync/overlay.hpp"

namespace wansync {

// Receiver-side observation of one chunk crossing one directed link.
// Timestamps are already clock-corrected.
struct ProbeSample {
  NodeId from = 0;
  NodeId to = 0;
  double send_ts = 0.0;
  double recv_ts = 0.0;
  std::uint64_t size = 0;  // data units
};

struct LinkEstimate {
  NodeId from = 0;
  NodeId to = 0;
  double throughput = 0.0;   // units/second
  std::uint32_t samples = 0;
  double updated_at = 0.0;

  bool operator==(const LinkEstimate&) const = default;
};

// Mean of per-chunk observed rates over the newest `window` samples of
// size >= min_size (min_size 0 keeps everything). Returns nothing until
// the window is full. Samples with non-positive delay are dropped and
// counted in *anomalies.
std::optional<LinkEstimate> estimate_throughput(const std::deque<ProbeSample>& samples,
                                                std::uint64_t min_size,
                                                std::uint32_t window,
                                                std::uint32_t* anomalies = nullptr);

// Reference-clock correction: per-node offset and skew against the
// scheduler clock (the reference has offset 0). corrected = ts - offset
// - skew * ts.
struct ClockModel {
  std::vector<double> offset;
  std::vector<double> skew;

  static ClockModel zeros(std::uint32_t nodes);
  double correct(double ts, NodeId node) const;
};

// Throughput inferred from a stop-and-wait echo exchange by halving the
// round trip. The return leg's propagation rides in the halved total,
// which is exactly the bias a one-way timestamp avoids.
double estimate_roundtrip(std::uint64_t size, double send_ts, double echo_recv_ts);

// Scheduler-side estimate table, newest report wins per directed link.
class LinkStateStore {
 public:
  void merge(const LinkEstimate& e);
  void merge_all(const std::vector<LinkEstimate>& es);

  std::optional<LinkEstimate> get(NodeId from, NodeId to) const;
  std::size_t size() const { return table_.size(); }
  const std::map<std::pair<NodeId, NodeId>, LinkEstimate>& all() const { return table_; }

  // Undirected planning rate: min over the measured directions, or
  // default_rate when neither direction has been measured yet.
  double undirected_rate(NodeId a, NodeId b, double default_rate) const;

  // Per-link weights (1/rate) for planning against this store.
  DelayView planning_view(const OverlayGraph& g, double default_rate) const;

 private:
  std::map<std::pair<NodeId, NodeId>, LinkEstimate> table_;
};

}  // namespace wansync
