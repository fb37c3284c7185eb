#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "json.hpp"
#include "wansync/experiment.hpp"

using namespace wansync;
using testutil::flat_link;
using testutil::make_scenario;

namespace {

OverlayGraph complete_graph(std::uint32_t n, double rate) {
  std::vector<LinkSpec> links;
  for (NodeId a = 0; a < n; ++a)
    for (NodeId b = a + 1; b < n; ++b) links.push_back(flat_link(a, b, rate));
  return OverlayGraph(n, links);
}

}  // namespace

TEST_CASE("run kind names round-trip") {
  for (RunKind k : {RunKind::Fapt, RunKind::Star, RunKind::Bkt, RunKind::Mst}) {
    auto back = run_kind_from_string(to_string(k));
    REQUIRE(back.has_value());
    CHECK(*back == k);
  }
  CHECK(!run_kind_from_string("RING").has_value());
  CHECK(!run_kind_from_string("star").has_value());
}

TEST_CASE("planned tree beats the minimum spanning tree on a lopsided triangle") {
  // Weights 2,2,3: the spanning tree of least total weight chains through
  // node 1, but rooting a star at node 1 halves the completion time.
  OverlayGraph g(3, {flat_link(0, 1, 0.5), flat_link(1, 2, 0.5), flat_link(0, 2, 1.0 / 3)});
  Scenario sc = make_scenario(g, {{"t", 1}});
  sc.params.chunk_size = 1;
  sc.params.num_root_servers = 1;
  auto rows = run_compare(sc, {RunKind::Star, RunKind::Fapt, RunKind::Mst}, 1, 1);

  REQUIRE(rows.size() == 3);
  const CompareRow& star = rows[0];
  const CompareRow& fapt = rows[1];
  const CompareRow& mst = rows[2];
  CHECK(star.feasible);
  CHECK(star.normalized == 1.0);
  CHECK(star.mean_completion == 3.0);
  CHECK(fapt.mean_completion == 2.0);
  CHECK(mst.mean_completion == 4.0);
  CHECK(fapt.normalized == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(mst.normalized == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(fapt.normalized > star.normalized);
  CHECK(mst.normalized < star.normalized);
}

TEST_CASE("balanced trees pay less aggregation fan-in than a star") {
  // Homogeneous complete graph, aggregation at 2 s per folded input: the
  // star root folds 7 inputs after one hop (17 s total) while the
  // two-way tree folds 3 per level over two hops (16 s total).
  Scenario sc = make_scenario(complete_graph(7, 1.0), {{"t", 1}});
  sc.params.chunk_size = 1;
  sc.params.aggregation_cost = 2.0;
  sc.params.bkt_fanout = 2;
  auto rows = run_compare(sc, {RunKind::Star, RunKind::Bkt}, 1, 1);

  REQUIRE(rows.size() == 2);
  CHECK(rows[0].mean_completion == 17.0);
  CHECK(rows[1].mean_completion == 16.0);
  CHECK(rows[0].normalized == 1.0);
  CHECK(rows[1].normalized == doctest::Approx(17.0 / 16.0).epsilon(1e-12));
  CHECK(rows[1].normalized > 1.0);
}

TEST_CASE("an infeasible reference is reported and zeroes the normalization") {
  // A path graph has no star around node 0.
  OverlayGraph g(3, {flat_link(0, 1, 1.0), flat_link(1, 2, 1.0)});
  Scenario sc = make_scenario(g, {{"t", 1}});
  sc.params.chunk_size = 1;
  sc.params.num_root_servers = 1;
  auto rows = run_compare(sc, {RunKind::Star, RunKind::Fapt, RunKind::Mst}, 1, 1);

  REQUIRE(rows.size() == 3);
  CHECK(!rows[0].feasible);
  CHECK(!rows[0].note.empty());
  CHECK(rows[0].normalized == 0.0);
  CHECK(rows[1].feasible);
  CHECK(rows[1].mean_completion > 0.0);
  CHECK(rows[1].normalized == 0.0);  // nothing to normalize against
  CHECK(rows[2].normalized == 0.0);
}

TEST_CASE("feature stages agree exactly on an unloaded static overlay") {
  // One chunk per queue never exceeds the busy bound and the default
  // probe filter swallows every sample, so all three stages replay the
  // same event sequence.
  OverlayGraph g(3, {flat_link(0, 1, 0.5), flat_link(1, 2, 0.25)});
  Scenario sc = make_scenario(g, {{"t", 1}});
  sc.params.chunk_size = 1;
  sc.params.num_root_servers = 1;
  auto rows = run_ablate(sc, {Stage::Lite, Stage::Std, Stage::Pro}, 1, 2);

  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    CHECK(r.mean_completion == 4.0);  // star around node 1, slow arm is 4 s
    CHECK(r.first_completion == 4.0);
    CHECK(r.last_completion == 4.0);
    CHECK(r.chunks_via_aux == 0);
    CHECK(r.epochs == 1);
    CHECK(!r.deadlock);
    CHECK(r.mean_estimate_error == -1.0);
  }
  CHECK(rows[0].stage == "lite");
  CHECK(rows[1].stage == "std");
  CHECK(rows[2].stage == "pro");
}

TEST_CASE("chunk size sweeps expose pipelining on multi-hop branches") {
  // Five-node path planned around the center: four data units relayed
  // whole take 8 s per branch, but unit chunks overlap the two hops.
  OverlayGraph g(5, {flat_link(0, 1, 1.0), flat_link(1, 2, 1.0), flat_link(2, 3, 1.0),
                     flat_link(3, 4, 1.0)});
  Scenario sc = make_scenario(g, {{"t", 4}});
  sc.params.num_root_servers = 1;
  auto rows = run_sweep(sc, "CHUNK_SIZE", {"1", "4"}, 1, 1, Stage::Lite);

  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == "1");
  CHECK(rows[0].mean_completion == 5.0);
  CHECK(rows[1].value == "4");
  CHECK(rows[1].mean_completion == 8.0);
  CHECK(rows[0].units_per_second > rows[1].units_per_second);
}

TEST_CASE("sweeping an unknown or fixed parameter is refused") {
  Scenario sc = make_scenario(OverlayGraph(2, {flat_link(0, 1, 1.0)}), {{"t", 1}});
  CHECK_THROWS_AS(run_sweep(sc, "NUM_ROOT_SERVERS", {"1"}, 1, 1, Stage::Lite), ExperimentError);
  CHECK_THROWS_AS(run_sweep(sc, "ENABLE_AWARENESS", {"true"}, 1, 1, Stage::Lite),
                  ExperimentError);
  CHECK_THROWS_AS(run_sweep(sc, "CHUNK_SIZE", {}, 1, 1, Stage::Lite), ExperimentError);
  CHECK_THROWS_AS(run_compare(sc, {}, 1, 1), ExperimentError);
  CHECK_THROWS_AS(run_ablate(sc, {}, 1, 1), ExperimentError);
}

TEST_CASE("csv emitters produce stable golden output") {
  SUBCASE("compare") {
    CompareRow row;
    row.kind = "STAR";
    row.mean_completion = 2.0;
    row.units_per_second = 0.5;
    row.normalized = 1.0;
    CHECK(compare_to_csv({row}) ==
          "# wansync-csv v1\n"
          "kind,feasible,mean_completion,units_per_second,normalized,chunks_via_aux,deadlock,"
          "note\n"
          "STAR,1,2,0.5,1,0,0,\n");
  }
  SUBCASE("ablate") {
    AblateRow row;
    row.stage = "std";
    row.mean_completion = 1.5;
    row.units_per_second = 8.0 / 3.0;
    row.first_completion = 2.0;
    row.last_completion = 1.0;
    row.mean_estimate_error = 0.125;
    row.chunks_via_aux = 3;
    row.epochs = 4;
    CHECK(ablate_to_csv({row}) ==
          "# wansync-csv v1\n"
          "stage,mean_completion,units_per_second,first_completion,last_completion,"
          "mean_estimate_error,chunks_via_aux,epochs,deadlock\n"
          "std,1.5,2.66666667,2,1,0.125,3,4,0\n");
  }
  SUBCASE("sweep") {
    SweepRow row;
    row.value = "1000";
    row.mean_completion = 0.25;
    row.units_per_second = 4000.0;
    CHECK(sweep_to_csv("CHUNK_SIZE", {row}) ==
          "# wansync-csv v1\n"
          "param,value,mean_completion,units_per_second,chunks_via_aux,deadlock\n"
          "CHUNK_SIZE,1000,0.25,4000,0,0\n");
  }
}

TEST_CASE("per-iteration csv matches a hand-checked run") {
  Scenario sc = make_scenario(OverlayGraph(2, {flat_link(0, 1, 4.0, 0.5)}), {{"t", 3}});
  SimOptions opt;
  opt.stage = Stage::Lite;
  opt.fixed_plan = testutil::fixed_tree_plan(sc.graph, DelayView::at_time(sc.graph, 0.0),
                                             AggTree{0, {0, 0}});
  RunResult r = simulate(sc, opt);
  CHECK(iterations_to_csv(r) ==
        "# wansync-csv v1\n"
        "iteration,epoch,start,end,completion,chunks_total,chunks_via_aux,"
        "mean_utilization,mean_estimate_error\n"
        "0,1,0,1.25,1.25,1,0,0.3,-1\n");
}

TEST_CASE("identical compare runs serialize identically") {
  Scenario sc = make_scenario(complete_graph(4, 1.0), {{"t", 4}});
  sc.params.chunk_size = 1;
  sc.params.num_root_servers = 2;
  auto a = compare_to_csv(run_compare(sc, {RunKind::Star, RunKind::Fapt, RunKind::Bkt}, 7, 2));
  auto b = compare_to_csv(run_compare(sc, {RunKind::Star, RunKind::Fapt, RunKind::Bkt}, 7, 2));
  CHECK(a == b);
  CHECK(a.find("# wansync-csv v1\n") == 0);
}

TEST_CASE("run summaries serialize the safety counters") {
  Scenario sc = make_scenario(OverlayGraph(2, {flat_link(0, 1, 1.0)}), {{"t", 2}});
  sc.params.chunk_size = 1;
  sc.params.num_root_servers = 1;
  SimOptions opt;
  opt.stage = Stage::Lite;
  RunResult r = simulate(sc, opt);
  auto j = nlohmann::json::parse(run_summary_json(sc, r));
  CHECK(j.at("iterations") == 1);
  CHECK(j.at("deadlock") == false);
  CHECK(j.at("duplicate_deposits") == 0);
  CHECK(j.at("conservation_failures") == 0);
  CHECK(j.at("final_epoch") == 1);
  CHECK(j.at("mean_completion") == 2.0);
  CHECK(j.at("estimates").is_array());
}
