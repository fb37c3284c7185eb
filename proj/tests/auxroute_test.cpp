#include <random>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "wansync/auxroute.hpp"

using namespace wansync;
using testutil::flat_link;

namespace {

std::set<LinkId> path_links(const OverlayGraph& g, const std::vector<NodeId>& path) {
  std::set<LinkId> out;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) out.insert(*g.find_link(path[i], path[i + 1]));
  return out;
}

double path_cost(const OverlayGraph& g, const DelayView& d, const std::vector<NodeId>& path) {
  double c = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) c += d.weight(*g.find_link(path[i], path[i + 1]));
  return c;
}

}  // namespace

TEST_CASE("uniform four-cycle: greedy rounds hand each link to the first claimant") {
  OverlayGraph g(4, {flat_link(0, 1, 1.0), flat_link(1, 2, 1.0), flat_link(2, 3, 1.0),
                     flat_link(3, 0, 1.0)});
  DelayView d = DelayView::from_weights({1.0, 1.0, 1.0, 1.0});
  auto table = search_aux_paths(g, d);

  // Round one processes ordered pairs ascending; every link is consumed
  // by the first pair whose cached fastest path is still intact, so the
  // later pairs (whose routes were invalidated mid-round) end up empty.
  CHECK(table.paths(0, 1) == AuxRouteTable::PathList{{0, 1}});
  CHECK(table.paths(0, 3) == AuxRouteTable::PathList{{0, 3}});
  CHECK(table.paths(1, 2) == AuxRouteTable::PathList{{1, 2}});
  CHECK(table.paths(2, 3) == AuxRouteTable::PathList{{2, 3}});
  CHECK(table.paths(0, 2).empty());
  CHECK(table.paths(1, 0).empty());
  CHECK(table.paths(3, 0).empty());
}

TEST_CASE("a pair collects a second, slower path from a later round") {
  // Round one gives (0,1) the direct link and (0,2) the fast relay 0-3-2,
  // invalidating everyone else.  The two slow links survive into round two,
  // where (0,1) claims them as a second, slower route.
  OverlayGraph g(4, {flat_link(0, 1, 1.0), flat_link(0, 2, 0.2), flat_link(1, 2, 0.2),
                     flat_link(0, 3, 1.0), flat_link(2, 3, 1.0)});
  DelayView d = DelayView::from_weights({1.0, 5.0, 5.0, 1.0, 1.0});
  auto table = search_aux_paths(g, d);
  const auto& p01 = table.paths(0, 1);
  REQUIRE(p01.size() == 2);
  CHECK(p01[0] == std::vector<NodeId>{0, 1});     // delay 1
  CHECK(p01[1] == std::vector<NodeId>{0, 2, 1});  // delay 10, edge-disjoint leftover
  CHECK(table.paths(0, 2) == AuxRouteTable::PathList{{0, 3, 2}});
  CHECK(table.paths(2, 3).empty());  // its direct link went to the relay instead
}

TEST_CASE("per-pair lists are edge-disjoint, ordered, and cover the graph") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    auto wg = testutil::random_graph(rng, 6, 5, 9);
    auto table = search_aux_paths(wg.g, wg.d);

    std::set<LinkId> covered;
    for (NodeId i = 0; i < 6; ++i) {
      for (NodeId j = 0; j < 6; ++j) {
        if (i == j) continue;
        std::set<LinkId> seen;
        double last = -1.0;
        for (const auto& p : table.paths(i, j)) {
          REQUIRE(p.size() >= 2);
          CHECK(p.front() == i);
          CHECK(p.back() == j);
          for (LinkId e : path_links(wg.g, p)) {
            CHECK(!seen.count(e));  // pairwise edge-disjoint within the pair
            seen.insert(e);
            covered.insert(e);
          }
          double c = path_cost(wg.g, wg.d, p);
          CHECK(c >= last);  // fastest first
          last = c;
        }
      }
    }
    CHECK(covered.size() == wg.g.links().size());  // every link used somewhere
  }
}

TEST_CASE("path cap bounds every pair list") {
  std::mt19937_64 rng(29);
  auto wg = testutil::random_graph(rng, 6, 6, 5);
  auto table = search_aux_paths(wg.g, wg.d, 1);
  for (const auto& [pair, list] : table.all()) {
    (void)pair;
    CHECK(list.size() <= 1);
  }
}

TEST_CASE("the first processed pair always gets the unrestricted fastest path") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto wg = testutil::random_graph(rng, 6, 4, 9);
    auto table = search_aux_paths(wg.g, wg.d);
    auto paths = shortest_paths_from(wg.g, wg.d, 0);
    // Ordered pair (0,1) is processed before any link is removed.
    REQUIRE(!table.paths(0, 1).empty());
    CHECK(table.paths(0, 1)[0] == paths[1].nodes);
  }
}

TEST_CASE("ranking is stable for equal cost and favors fewer hops") {
  OverlayGraph g(4, {flat_link(0, 1, 1.0), flat_link(1, 3, 1.0), flat_link(0, 2, 1.0),
                     flat_link(2, 3, 1.0), flat_link(0, 3, 0.5)});
  DelayView d = DelayView::from_weights({1.0, 1.0, 1.0, 1.0, 2.0});
  std::vector<std::vector<NodeId>> paths{{0, 2, 3}, {0, 3}, {0, 1, 3}};
  auto ranked = rank_paths(paths, g, d);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked[0] == std::vector<NodeId>{0, 3});     // 2 units over 1 hop
  CHECK(ranked[1] == std::vector<NodeId>{0, 2, 3});  // 2 units, first listed of the ties
  CHECK(ranked[2] == std::vector<NodeId>{0, 1, 3});
}
