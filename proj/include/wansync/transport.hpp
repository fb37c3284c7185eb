#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "wansync/config.hpp"
#include "wansync/overlay.hpp"

namespace wansync {

struct TensorSpec {
  std::string name;
  std::uint64_t size = 0;  // data units

  bool operator==(const TensorSpec&) const = default;
};

struct Chunk {
  std::uint32_t tensor_id = 0;   // index into the scenario tensor list
  std::uint32_t chunk_index = 0;
  std::uint64_t size = 0;
  NodeId owner_root = 0;

  bool operator==(const Chunk&) const = default;
};

// Sizes of the pieces a tensor splits into: all chunk_size except a
// smaller tail; tensors no larger than chunk_size stay whole.
std::vector<std::uint64_t> split_tensor(std::uint64_t tensor_size, std::uint64_t chunk_size);

// Largest-remainder apportionment of `total` items over shares; ties go
// to the lower root id. Shares must be positive and sum to ~1.
std::map<NodeId, std::uint64_t> apportion_counts(std::uint64_t total,
                                                 const std::map<NodeId, double>& shares);

// Assigns owner roots to chunks in order: ascending root id, each root
// taking its apportioned count of consecutive chunks.
void assign_roots(std::vector<Chunk>& chunks, const std::map<NodeId, double>& shares);

// Builds the full chunk list for a tensor set.
std::vector<Chunk> make_chunks(const std::vector<TensorSpec>& tensors,
                               std::uint64_t chunk_size,
                               const std::map<NodeId, double>& shares);

struct ChunkQueue {
  std::deque<Chunk> queued;
  std::uint32_t occupancy = 0;  // assigned and not yet delivered at the path end
};

// One primary route plus zero or more auxiliary routes toward a next hop.
struct SendQueues {
  ChunkQueue primary;
  std::vector<ChunkQueue> aux;
};

struct PathChoice {
  bool is_aux = false;
  std::uint32_t aux_index = 0;  // valid when is_aux
};

bool is_busy(std::uint32_t occupancy, std::uint32_t bound, BusyRule rule);

// Route pick for one chunk: primary while it is not busy; otherwise the
// fastest auxiliary route with spare capacity; primary again when every
// auxiliary route is full.
PathChoice pick_path(const SendQueues& q, std::uint32_t primary_busy_bound,
                     std::uint32_t aux_capacity, BusyRule rule);

}  // namespace wansync
