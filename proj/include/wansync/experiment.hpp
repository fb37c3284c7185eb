#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wansync/simnet.hpp"

namespace wansync {

struct ExperimentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Topology selector for comparison runs. FAPT is the planned multi-root
// tree set; the rest are single-root references.
enum class RunKind { Fapt, Star, Bkt, Mst };

std::optional<RunKind> run_kind_from_string(const std::string& s);
std::string to_string(RunKind k);

// Plan built from the scenario's time-zero rates for one topology kind.
// Throws PlanningError when the overlay cannot host the shape.
SyncPlan plan_for_kind(const Scenario& sc, RunKind kind);

// Data units synchronized per iteration (sum of tensor sizes).
double total_units(const Scenario& sc);

struct CompareRow {
  std::string kind;
  bool feasible = true;
  std::string note;  // infeasibility reason, empty otherwise
  double mean_completion = 0.0;
  double units_per_second = 0.0;
  double normalized = 0.0;  // units_per_second relative to the STAR row
  std::uint64_t chunks_via_aux = 0;
  bool deadlock = false;
};

// One fixed-plan run per kind under the same seed, every stage feature
// off. Infeasible kinds are reported and skipped; `normalized` is 0 for
// every row when the STAR row itself is missing or infeasible.
std::vector<CompareRow> run_compare(const Scenario& sc, const std::vector<RunKind>& kinds,
                                    std::uint64_t seed, std::uint32_t horizon);

struct AblateRow {
  std::string stage;
  double mean_completion = 0.0;
  double units_per_second = 0.0;
  double first_completion = 0.0;
  double last_completion = 0.0;
  double mean_estimate_error = -1.0;  // final iteration; -1 when nothing measured
  std::uint64_t chunks_via_aux = 0;
  std::uint32_t epochs = 0;  // policy versions formulated over the run
  bool deadlock = false;
};

std::vector<AblateRow> run_ablate(const Scenario& sc, const std::vector<Stage>& stages,
                                  std::uint64_t seed, std::uint32_t horizon);

struct SweepRow {
  std::string value;
  double mean_completion = 0.0;
  double units_per_second = 0.0;
  std::uint64_t chunks_via_aux = 0;
  bool deadlock = false;
};

// Reruns the scenario once per value of one hyperparameter (sweepable
// keys only), everything else held fixed. Throws ExperimentError on a
// non-sweepable key.
std::vector<SweepRow> run_sweep(const Scenario& sc, const std::string& param,
                                const std::vector<std::string>& values, std::uint64_t seed,
                                std::uint32_t horizon, Stage stage);

// CSV emitters. First line is "# wansync-csv v1"; floats use %.9g so
// identical runs serialize identically.
std::string compare_to_csv(const std::vector<CompareRow>& rows);
std::string ablate_to_csv(const std::vector<AblateRow>& rows);
std::string sweep_to_csv(const std::string& param, const std::vector<SweepRow>& rows);
std::string iterations_to_csv(const RunResult& r);
std::string run_summary_json(const Scenario& sc, const RunResult& r);

}  // namespace wansync
