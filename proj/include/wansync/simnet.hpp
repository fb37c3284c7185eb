#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wansync/awareness.hpp"
#include "wansync/consistency.hpp"
#include "wansync/scenario.hpp"

namespace wansync {

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Feature stages: Lite runs the static plan alone, Std adds passive
// throughput awareness with periodic replanning, Pro adds auxiliary
// multipath transmission on top.
enum class Stage { Lite, Std, Pro };

std::optional<Stage> stage_from_string(const std::string& s);
std::string to_string(Stage s);

// Control-plane fault/abuse injection for protocol tests.
struct ControlFaults {
  // Extra per-node delay added to every policy response (empty = none).
  std::vector<double> trp_response_extra_delay;
  // Adversarial uniform [0, max) delay added to policy requests and
  // responses, drawn from the run seed.
  double random_control_delay_max = 0.0;
  // Scheduler never answers this node: the run must end in a detected
  // deadlock instead of hanging.
  std::optional<NodeId> drop_trp_responses_for;
};

struct SimOptions {
  std::uint64_t seed = 1;
  std::uint32_t horizon = 1;  // iterations to run
  Stage stage = Stage::Pro;
  // Run exactly this plan instead of planning from the scenario; policy
  // refresh is disabled. Used for reference topologies and oracle runs.
  std::optional<SyncPlan> fixed_plan;
  ControlFaults faults;
  std::ostream* trace = nullptr;  // event-by-event log for golden diffs
};

struct IterationMetrics {
  std::uint32_t index = 0;
  std::uint32_t epoch = 0;  // policy epoch the iteration ran under
  double start = 0.0;
  double end = 0.0;
  std::uint64_t chunks_total = 0;
  std::uint64_t chunks_via_aux = 0;       // sender-side auxiliary assignments
  double mean_estimate_error = -1.0;      // vs true rates at iteration end; -1 if no estimates
  std::vector<double> link_utilization;   // per directed link (2*link, +1 for b->a)
  double mean_utilization = 0.0;

  double completion() const { return end - start; }
};

struct RunResult {
  std::vector<IterationMetrics> iterations;
  bool deadlock = false;
  std::string diagnostic;  // deadlock / safety-violation report

  // Safety counters; all zero on a healthy run.
  std::uint64_t duplicate_deposits = 0;
  std::uint64_t conservation_failures = 0;
  std::uint64_t probe_anomalies = 0;

  std::uint32_t final_epoch = 0;
  LinkStateStore final_estimates;
  std::map<std::uint32_t, SyncPlan> plans;  // every formulated epoch

  double mean_completion() const;
};

// Runs the full synchronization workload on the scenario's overlay:
// every node pushes every chunk toward the chunk's owner root along the
// epoch's tree, non-leaf nodes aggregate-forward, links serve concurrent
// transfers by equal sharing per direction, and the scheduler refreshes
// the policy from reported estimates every UPDATE_TIME.
RunResult simulate(const Scenario& scenario, const SimOptions& options);

}  // namespace wansync
