#include "wansync/experiment.hpp"

#include <cstdio>
#include <sstream>

#include "json.hpp"

namespace wansync {

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

RunResult run_fixed(const Scenario& sc, const SyncPlan& plan, std::uint64_t seed,
                    std::uint32_t horizon) {
  SimOptions opt;
  opt.seed = seed;
  opt.horizon = horizon;
  opt.stage = Stage::Lite;
  opt.fixed_plan = plan;
  return simulate(sc, opt);
}

}  // namespace

std::optional<RunKind> run_kind_from_string(const std::string& s) {
  if (s == "FAPT") return RunKind::Fapt;
  if (s == "STAR") return RunKind::Star;
  if (s == "BKT") return RunKind::Bkt;
  if (s == "MST") return RunKind::Mst;
  return std::nullopt;
}

std::string to_string(RunKind k) {
  switch (k) {
    case RunKind::Fapt: return "FAPT";
    case RunKind::Star: return "STAR";
    case RunKind::Bkt: return "BKT";
    case RunKind::Mst: return "MST";
  }
  return "?";
}

SyncPlan plan_for_kind(const Scenario& sc, RunKind kind) {
  DelayView d = DelayView::at_time(sc.graph, 0.0);
  switch (kind) {
    case RunKind::Fapt:
      return build_plan(sc.graph, d, {}, sc.params.num_root_servers, 1);
    case RunKind::Star:
      return build_baseline(sc.graph, d, BaselineKind::Star, sc.params.baseline_root,
                            sc.params.bkt_fanout, 1);
    case RunKind::Bkt:
      return build_baseline(sc.graph, d, BaselineKind::Bkt, sc.params.baseline_root,
                            sc.params.bkt_fanout, 1);
    case RunKind::Mst:
      return build_baseline(sc.graph, d, BaselineKind::Mst, sc.params.baseline_root,
                            sc.params.bkt_fanout, 1);
  }
  throw ExperimentError("unknown run kind");
}

double total_units(const Scenario& sc) {
  double sum = 0.0;
  for (const auto& t : sc.tensors) sum += static_cast<double>(t.size);
  return sum;
}

std::vector<CompareRow> run_compare(const Scenario& sc, const std::vector<RunKind>& kinds,
                                    std::uint64_t seed, std::uint32_t horizon) {
  if (kinds.empty()) throw ExperimentError("no topology kinds given");
  std::vector<CompareRow> rows;
  double star_ups = 0.0;
  for (RunKind k : kinds) {
    CompareRow row;
    row.kind = to_string(k);
    SyncPlan plan;
    try {
      plan = plan_for_kind(sc, k);
    } catch (const PlanningError& e) {
      row.feasible = false;
      row.note = e.what();
      rows.push_back(std::move(row));
      continue;
    }
    RunResult r = run_fixed(sc, plan, seed, horizon);
    row.deadlock = r.deadlock;
    row.mean_completion = r.mean_completion();
    if (row.mean_completion > 0) row.units_per_second = total_units(sc) / row.mean_completion;
    row.chunks_via_aux = 0;
    for (const auto& it : r.iterations) row.chunks_via_aux += it.chunks_via_aux;
    if (k == RunKind::Star && !r.deadlock) star_ups = row.units_per_second;
    rows.push_back(std::move(row));
  }
  if (star_ups > 0)
    for (auto& row : rows)
      if (row.feasible && !row.deadlock) row.normalized = row.units_per_second / star_ups;
  return rows;
}

std::vector<AblateRow> run_ablate(const Scenario& sc, const std::vector<Stage>& stages,
                                  std::uint64_t seed, std::uint32_t horizon) {
  if (stages.empty()) throw ExperimentError("no stages given");
  std::vector<AblateRow> rows;
  for (Stage s : stages) {
    SimOptions opt;
    opt.seed = seed;
    opt.horizon = horizon;
    opt.stage = s;
    RunResult r = simulate(sc, opt);
    AblateRow row;
    row.stage = to_string(s);
    row.deadlock = r.deadlock;
    row.mean_completion = r.mean_completion();
    if (row.mean_completion > 0) row.units_per_second = total_units(sc) / row.mean_completion;
    if (!r.iterations.empty()) {
      row.first_completion = r.iterations.front().completion();
      row.last_completion = r.iterations.back().completion();
      row.mean_estimate_error = r.iterations.back().mean_estimate_error;
    }
    for (const auto& it : r.iterations) row.chunks_via_aux += it.chunks_via_aux;
    row.epochs = r.final_epoch;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const Scenario& sc, const std::string& param,
                                const std::vector<std::string>& values, std::uint64_t seed,
                                std::uint32_t horizon, Stage stage) {
  if (!is_sweepable_param(param)) throw ExperimentError("parameter not sweepable: " + param);
  if (values.empty()) throw ExperimentError("no sweep values given");
  std::vector<SweepRow> rows;
  for (const std::string& v : values) {
    Scenario point = sc;
    point.params.set(param, v);
    SimOptions opt;
    opt.seed = seed;
    opt.horizon = horizon;
    opt.stage = stage;
    RunResult r = simulate(point, opt);
    SweepRow row;
    row.value = v;
    row.deadlock = r.deadlock;
    row.mean_completion = r.mean_completion();
    if (row.mean_completion > 0) row.units_per_second = total_units(sc) / row.mean_completion;
    for (const auto& it : r.iterations) row.chunks_via_aux += it.chunks_via_aux;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string compare_to_csv(const std::vector<CompareRow>& rows) {
  std::ostringstream out;
  out << "# wansync-csv v1\n";
  out << "kind,feasible,mean_completion,units_per_second,normalized,chunks_via_aux,deadlock,note\n";
  for (const auto& r : rows) {
    out << r.kind << ',' << (r.feasible ? 1 : 0) << ',' << fmt9(r.mean_completion) << ','
        << fmt9(r.units_per_second) << ',' << fmt9(r.normalized) << ',' << r.chunks_via_aux << ','
        << (r.deadlock ? 1 : 0) << ',' << r.note << '\n';
  }
  return out.str();
}

std::string ablate_to_csv(const std::vector<AblateRow>& rows) {
  std::ostringstream out;
  out << "# wansync-csv v1\n";
  out << "stage,mean_completion,units_per_second,first_completion,last_completion,"
         "mean_estimate_error,chunks_via_aux,epochs,deadlock\n";
  for (const auto& r : rows) {
    out << r.stage << ',' << fmt9(r.mean_completion) << ',' << fmt9(r.units_per_second) << ','
        << fmt9(r.first_completion) << ',' << fmt9(r.last_completion) << ','
        << fmt9(r.mean_estimate_error) << ',' << r.chunks_via_aux << ',' << r.epochs << ','
        << (r.deadlock ? 1 : 0) << '\n';
  }
  return out.str();
}

std::string sweep_to_csv(const std::string& param, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "# wansync-csv v1\n";
  out << "param,value,mean_completion,units_per_second,chunks_via_aux,deadlock\n";
  for (const auto& r : rows) {
    out << param << ',' << r.value << ',' << fmt9(r.mean_completion) << ','
        << fmt9(r.units_per_second) << ',' << r.chunks_via_aux << ',' << (r.deadlock ? 1 : 0)
        << '\n';
  }
  return out.str();
}

std::string iterations_to_csv(const RunResult& r) {
  std::ostringstream out;
  out << "# wansync-csv v1\n";
  out << "iteration,epoch,start,end,completion,chunks_total,chunks_via_aux,"
         "mean_utilization,mean_estimate_error\n";
  for (const auto& it : r.iterations) {
    out << it.index << ',' << it.epoch << ',' << fmt9(it.start) << ',' << fmt9(it.end) << ','
        << fmt9(it.completion()) << ',' << it.chunks_total << ',' << it.chunks_via_aux << ','
        << fmt9(it.mean_utilization) << ',' << fmt9(it.mean_estimate_error) << '\n';
  }
  return out.str();
}

std::string run_summary_json(const Scenario& sc, const RunResult& r) {
  nlohmann::json j;
  j["iterations"] = r.iterations.size();
  j["mean_completion"] = r.mean_completion();
  j["units_per_second"] =
      r.mean_completion() > 0 ? total_units(sc) / r.mean_completion() : 0.0;
  j["deadlock"] = r.deadlock;
  if (r.deadlock) j["diagnostic"] = r.diagnostic;
  j["duplicate_deposits"] = r.duplicate_deposits;
  j["conservation_failures"] = r.conservation_failures;
  j["probe_anomalies"] = r.probe_anomalies;
  j["final_epoch"] = r.final_epoch;
  nlohmann::json est = nlohmann::json::array();
  for (const auto& [key, e] : r.final_estimates.all()) {
    est.push_back({{"from", key.first},
                   {"to", key.second},
                   {"throughput", e.throughput},
                   {"updated_at", e.updated_at}});
  }
  j["estimates"] = est;
  return j.dump(2);
}

}  // namespace wansync
