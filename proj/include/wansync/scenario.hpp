#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wansync/config.hpp"
#include "wansync/overlay.hpp"
#include "wansync/transport.hpp"

namespace wansync {

struct ScenarioError : std::runtime_error {
  ScenarioError(const std::string& msg, int line_no)
      : std::runtime_error(msg + " (line " + std::to_string(line_no) + ")"), line(line_no) {}
  int line;
};

// A complete experiment input: overlay, workload, knobs, clock faults.
//
// File grammar (one declaration per line, '#' starts a comment):
//   nodes <count>
//   set <KEY> <VALUE>
//   tensor <name> <size-in-units>
//   link <a> <b> rate=<t0>:<r0>[,<t1>:<r1>...] [latency=<seconds>] [loss=<fraction>]
//   clock <node> offset=<seconds> [skew=<seconds-per-second>]
// Unknown keywords, attributes, or `set` keys are rejected.
struct Scenario {
  OverlayGraph graph;
  std::vector<TensorSpec> tensors;
  Hyperparams params;
  std::vector<double> clock_offset;  // per node, seconds
  std::vector<double> clock_skew;    // per node

  bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(std::istream& in, const std::string& source_name = "<stream>");
Scenario parse_scenario_file(const std::string& path);

// Text form that parses back to a structurally equal scenario.
std::string emit_scenario(const Scenario& s);

}  // namespace wansync
