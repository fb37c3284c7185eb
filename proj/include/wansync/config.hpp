#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "wansync/overlay.hpp"

namespace wansync {

enum class BusyRule { Inclusive, Strict };  // busy iff occupancy >= bound vs > bound

// Run-time knobs. Names mirror the scenario-file `set` keys; every key
// can also be overridden by --set on the CLI or a WANSYNC_<KEY> env var.
struct Hyperparams {
  std::uint32_t num_root_servers = 9;        // NUM_ROOT_SERVERS
  std::uint64_t chunk_size = 1'000'000;      // CHUNK_SIZE, data units
  std::uint32_t primary_busy_bound = 2;      // PRIMARY_BUSY_BOUND
  std::uint32_t auxiliary_queue_length = 1;  // AUXILIARY_QUEUE_LENGTH
  std::uint64_t probe_chunk_size = 2'000'000;  // PROBE_CHUNK_SIZE, 0 disables filtering
  std::uint32_t probe_chunk_num = 4;         // PROBE_CHUNK_NUM
  double update_time = 5.0;                  // UPDATE_TIME, seconds
  double update_rate = 0.0;                  // UPDATE_RATE, relative-change threshold
  bool enable_awareness = true;              // ENABLE_AWARENESS
  bool enable_aux_path = true;               // ENABLE_AUX_PATH
  double default_rate = 1'000'000.0;         // DEFAULT_RATE for never-measured links
  double control_latency = 0.0;              // CONTROL_LATENCY, node<->scheduler one-way
  double aggregation_cost = 0.0;             // AGGREGATION_COST, seconds per aggregated input
  double compute_time = 0.0;                 // COMPUTE_TIME, seconds between iterations
  BusyRule busy_rule = BusyRule::Inclusive;  // BUSY_RULE inclusive|strict
  std::uint32_t max_aux_paths = 0;           // MAX_AUX_PATHS per pair, 0 = unlimited
  NodeId baseline_root = 0;                  // BASELINE_ROOT for STAR/BKT/MST
  std::uint32_t bkt_fanout = 2;              // BKT_FANOUT

  // Parses "KEY=VALUE" or applies (key, value); unknown keys throw.
  void set(const std::string& key, const std::string& value);
  void set_kv(const std::string& assignment);

  std::map<std::string, std::string> to_map() const;

  bool operator==(const Hyperparams&) const = default;
};

// Keys accepted by cmd `sweep --param`.
bool is_sweepable_param(const std::string& key);

}  // namespace wansync
