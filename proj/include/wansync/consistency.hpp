#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "wansync/auxroute.hpp"
#include "wansync/planner.hpp"

namespace wansync {

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a node needs to follow one policy epoch.
struct PolicyBundle {
  std::uint32_t epoch = 0;
  SyncPlan plan;
  AuxRouteTable aux;

  bool operator==(const PolicyBundle&) const = default;
};

enum class TrpPhase { Idle, AwaitingResponse, UpToDate };

// Per-message routing/cohort header. Wire layout (little endian):
//   u32 epoch | u8 is_aux | [u16 path_len, u32 node ids...] when is_aux
//   | i64 send_ts in nanoseconds | u32 sender | u32 tensor_id
//   | u32 chunk_index | u64 chunk_size
struct MessageMeta {
  std::uint32_t epoch = 0;
  bool is_aux = false;
  std::vector<NodeId> path;  // full route, source first; only set on aux sends
  double send_ts = 0.0;      // seconds, clock-corrected at the sending hop
  NodeId sender = 0;         // original data source (tree child), not the relay
  std::uint32_t tensor_id = 0;
  std::uint32_t chunk_index = 0;
  std::uint64_t chunk_size = 0;

  bool operator==(const MessageMeta&) const = default;
};

std::vector<std::uint8_t> encode_meta(const MessageMeta& m);
MessageMeta decode_meta(const std::vector<std::uint8_t>& bytes);  // throws ProtocolError

enum class ReceiveKind {
  Aggregate,  // deposit into the aggregation buffer of the message's epoch
  Forward,    // auxiliary relay: pass to the next node on the recorded path
  Cache       // message is ahead of the local epoch: hold until caught up
};

struct ReceiveAction {
  ReceiveKind kind = ReceiveKind::Aggregate;
  NodeId next_hop = 0;  // set when kind == Forward
};

// Receive rules: auxiliary traffic always follows the path recorded in
// the message regardless of the local table; primary traffic of a newer
// epoch waits for the local update; anything else aggregates under the
// message's own epoch.
ReceiveAction classify_receive(std::uint32_t local_epoch, NodeId node, const MessageMeta& m);

// Node-side retention of adopted bundles, keyed by epoch. Old epochs are
// garbage-collected once fully drained.
class PolicyStore {
 public:
  void adopt(std::shared_ptr<const PolicyBundle> bundle);
  std::shared_ptr<const PolicyBundle> get(std::uint32_t epoch) const;
  void gc(std::uint32_t oldest_live);
  std::size_t size() const { return bundles_.size(); }

 private:
  std::map<std::uint32_t, std::shared_ptr<const PolicyBundle>> bundles_;
};

}  // namespace wansync
