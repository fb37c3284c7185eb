// Scenario-driven experiment runner: plan inspection, topology
// comparisons, stage ablations, hyperparameter sweeps and single runs.
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wansync/experiment.hpp"

namespace {

struct CommonArgs {
  std::string scenario;
  std::uint64_t seed = 1;
  std::uint32_t horizon = 1;
  std::string out;  // empty = stdout
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_horizon) {
  cmd->add_option("--scenario", a.scenario, "Scenario file")
      ->required()
      ->envname("WANSYNC_SCENARIO");
  cmd->add_option("--seed", a.seed, "Deterministic run seed")->envname("WANSYNC_SEED");
  if (with_horizon)
    cmd->add_option("--horizon", a.horizon, "Iterations per run")->envname("WANSYNC_HORIZON");
  cmd->add_option("--out", a.out, "Output file (default stdout)")->envname("WANSYNC_OUT");
  cmd->add_option("--set", a.overrides, "Hyperparameter override KEY=VALUE")
      ->take_all()
      ->expected(-1);
}

wansync::Scenario load(const CommonArgs& a) {
  wansync::Scenario sc = wansync::parse_scenario_file(a.scenario);
  for (const std::string& kv : a.overrides) sc.params.set_kv(kv);
  return sc;
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

int cmd_plan(const CommonArgs& a) {
  wansync::Scenario sc = load(a);
  wansync::DelayView d = wansync::DelayView::at_time(sc.graph, 0.0);
  wansync::SyncPlan plan =
      wansync::build_plan(sc.graph, d, {}, sc.params.num_root_servers, 1);
  wansync::AuxRouteTable aux = wansync::search_aux_paths(sc.graph, d, sc.params.max_aux_paths);

  nlohmann::json j;
  j["plan"] = nlohmann::json::parse(wansync::plan_to_json(plan));
  nlohmann::json ja = nlohmann::json::object();
  for (const auto& [pair, paths] : aux.all()) {
    std::string key = std::to_string(pair.first) + "->" + std::to_string(pair.second);
    ja[key] = paths;
  }
  j["aux_paths"] = ja;
  write_out(a.out, j.dump(2) + "\n");
  return 0;
}

int cmd_compare(const CommonArgs& a, const std::string& kinds_arg) {
  wansync::Scenario sc = load(a);
  std::vector<wansync::RunKind> kinds;
  for (const std::string& k : split_csv(kinds_arg)) {
    auto kind = wansync::run_kind_from_string(k);
    if (!kind) throw CLI::ValidationError("--kinds", "unknown topology kind: " + k);
    kinds.push_back(*kind);
  }
  auto rows = wansync::run_compare(sc, kinds, a.seed, a.horizon);
  write_out(a.out, wansync::compare_to_csv(rows));
  return 0;
}

int cmd_ablate(const CommonArgs& a, const std::string& stages_arg) {
  wansync::Scenario sc = load(a);
  std::vector<wansync::Stage> stages;
  for (const std::string& s : split_csv(stages_arg)) {
    auto st = wansync::stage_from_string(s);
    if (!st) throw CLI::ValidationError("--stages", "unknown stage: " + s);
    stages.push_back(*st);
  }
  auto rows = wansync::run_ablate(sc, stages, a.seed, a.horizon);
  write_out(a.out, wansync::ablate_to_csv(rows));
  return 0;
}

int cmd_sweep(const CommonArgs& a, const std::string& param, const std::string& values_arg,
              const std::string& stage_arg) {
  wansync::Scenario sc = load(a);
  auto stage = wansync::stage_from_string(stage_arg);
  if (!stage) throw CLI::ValidationError("--stage", "unknown stage: " + stage_arg);
  if (!wansync::is_sweepable_param(param))
    throw CLI::ValidationError("--param", "parameter not sweepable: " + param);
  auto rows = wansync::run_sweep(sc, param, split_csv(values_arg), a.seed, a.horizon, *stage);
  write_out(a.out, wansync::sweep_to_csv(param, rows));
  return 0;
}

int cmd_run(const CommonArgs& a, const std::string& stage_arg, const std::string& topology_arg,
            const std::string& trace_path, const std::string& summary_path) {
  wansync::Scenario sc = load(a);
  wansync::SimOptions opt;
  opt.seed = a.seed;
  opt.horizon = a.horizon;

  if (!topology_arg.empty()) {
    auto kind = wansync::run_kind_from_string(topology_arg);
    if (!kind) throw CLI::ValidationError("--topology", "unknown topology kind: " + topology_arg);
    opt.stage = wansync::Stage::Lite;
    opt.fixed_plan = wansync::plan_for_kind(sc, *kind);
  } else {
    auto stage = wansync::stage_from_string(stage_arg);
    if (!stage) throw CLI::ValidationError("--stage", "unknown stage: " + stage_arg);
    opt.stage = *stage;
  }

  std::ofstream trace_file;
  if (!trace_path.empty()) {
    trace_file.open(trace_path, std::ios::binary);
    if (!trace_file) throw std::runtime_error("cannot open trace file: " + trace_path);
    opt.trace = &trace_file;
  }

  wansync::RunResult r = wansync::simulate(sc, opt);
  write_out(a.out, wansync::iterations_to_csv(r));
  if (!summary_path.empty()) write_out(summary_path, wansync::run_summary_json(sc, r) + "\n");
  if (r.deadlock) {
    std::cerr << r.diagnostic;
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Communication scheduler playground for WAN-distributed model synchronization"};
  app.require_subcommand(1);

  CommonArgs plan_args, compare_args, ablate_args, sweep_args, run_args;
  std::string kinds = "FAPT,STAR,BKT,MST";
  std::string stages = "lite,std,pro";
  std::string sweep_param, sweep_values, sweep_stage = "pro";
  std::string run_stage = "pro", run_topology, run_trace, run_summary;

  CLI::App* plan = app.add_subcommand("plan", "Print the planned trees and auxiliary routes");
  add_common(plan, plan_args, false);

  CLI::App* compare = app.add_subcommand("compare", "Run reference topologies side by side");
  add_common(compare, compare_args, true);
  compare->add_option("--kinds", kinds, "Comma list of FAPT,STAR,BKT,MST");

  CLI::App* ablate = app.add_subcommand("ablate", "Run feature stages side by side");
  add_common(ablate, ablate_args, true);
  ablate->add_option("--stages", stages, "Comma list of lite,std,pro");

  CLI::App* sweep = app.add_subcommand("sweep", "Rerun while varying one hyperparameter");
  add_common(sweep, sweep_args, true);
  sweep->add_option("--param", sweep_param, "Hyperparameter to vary")->required();
  sweep->add_option("--values", sweep_values, "Comma list of values")->required();
  sweep->add_option("--stage", sweep_stage, "Feature stage (lite|std|pro)");

  CLI::App* run = app.add_subcommand("run", "Single simulation, one CSV row per iteration");
  add_common(run, run_args, true);
  run->add_option("--stage", run_stage, "Feature stage (lite|std|pro)");
  run->add_option("--topology", run_topology, "Fixed topology (FAPT|STAR|BKT|MST) instead of a stage");
  run->add_option("--trace", run_trace, "Write an event-by-event trace to this file");
  run->add_option("--summary", run_summary, "Write a JSON run summary to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (plan->parsed()) return cmd_plan(plan_args);
    if (compare->parsed()) return cmd_compare(compare_args, kinds);
    if (ablate->parsed()) return cmd_ablate(ablate_args, stages);
    if (sweep->parsed()) return cmd_sweep(sweep_args, sweep_param, sweep_values, sweep_stage);
    if (run->parsed()) return cmd_run(run_args, run_stage, run_topology, run_trace, run_summary);
  } catch (const wansync::ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 2;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
