#include <map>
#include <vector>

#include "doctest.h"
#include "wansync/transport.hpp"

using namespace wansync;

TEST_CASE("split_tensor produces full chunks plus a tail") {
  CHECK(split_tensor(10, 4) == std::vector<std::uint64_t>{4, 4, 2});
  CHECK(split_tensor(8, 4) == std::vector<std::uint64_t>{4, 4});
  CHECK(split_tensor(3, 4) == std::vector<std::uint64_t>{3});  // stays whole
  CHECK(split_tensor(4, 4) == std::vector<std::uint64_t>{4});
  CHECK(split_tensor(1, 1) == std::vector<std::uint64_t>{1});
}

TEST_CASE("split_tensor rejects degenerate sizes") {
  CHECK_THROWS_AS(split_tensor(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(split_tensor(10, 0), std::invalid_argument);
}

TEST_CASE("apportion_counts uses largest remainders, ties to the lower id") {
  SUBCASE("exact split") {
    std::map<NodeId, double> shares{{0, 0.5}, {1, 0.5}};
    auto counts = apportion_counts(10, shares);
    CHECK(counts[0] == 5);
    CHECK(counts[1] == 5);
  }
  SUBCASE("remainder goes to the largest fraction") {
    std::map<NodeId, double> shares{{0, 0.2}, {1, 0.8}};
    auto counts = apportion_counts(7, shares);
    // floors 1 and 5, remainders 0.4 and 0.6: node 1 gets the leftover.
    CHECK(counts[0] == 1);
    CHECK(counts[1] == 6);
  }
  SUBCASE("equal fractions break toward the lower id") {
    std::map<NodeId, double> shares{{2, 0.5}, {7, 0.5}};
    auto counts = apportion_counts(5, shares);
    CHECK(counts[2] == 3);
    CHECK(counts[7] == 2);
  }
  SUBCASE("three-way with two leftovers") {
    std::map<NodeId, double> shares{{0, 1.0 / 3}, {1, 1.0 / 3}, {2, 1.0 / 3}};
    auto counts = apportion_counts(8, shares);
    // floors 2,2,2; remainders equal, so ids 0 and 1 take the two extras.
    CHECK(counts[0] == 3);
    CHECK(counts[1] == 3);
    CHECK(counts[2] == 2);
  }
  SUBCASE("totals are conserved") {
    std::map<NodeId, double> shares{{0, 0.17}, {3, 0.41}, {5, 0.42}};
    for (std::uint64_t total : {0ull, 1ull, 13ull, 100ull}) {
      auto counts = apportion_counts(total, shares);
      std::uint64_t sum = 0;
      for (auto& [id, c] : counts) sum += c;
      CHECK(sum == total);
    }
  }
}

TEST_CASE("assign_roots hands out contiguous runs by ascending root id") {
  std::vector<Chunk> chunks(5);
  for (std::uint32_t i = 0; i < 5; ++i) chunks[i].chunk_index = i;
  std::map<NodeId, double> shares{{1, 0.6}, {4, 0.4}};
  assign_roots(chunks, shares);
  CHECK(chunks[0].owner_root == 1);
  CHECK(chunks[1].owner_root == 1);
  CHECK(chunks[2].owner_root == 1);
  CHECK(chunks[3].owner_root == 4);
  CHECK(chunks[4].owner_root == 4);
}

TEST_CASE("make_chunks crosses tensors with apportioned owners") {
  std::vector<TensorSpec> tensors{{"grad_a", 10}, {"grad_b", 4}};
  std::map<NodeId, double> shares{{0, 0.5}, {2, 0.5}};
  auto chunks = make_chunks(tensors, 4, shares);
  REQUIRE(chunks.size() == 4);
  CHECK(chunks[0] == Chunk{0, 0, 4, 0});
  CHECK(chunks[1] == Chunk{0, 1, 4, 0});
  CHECK(chunks[2] == Chunk{0, 2, 2, 2});
  CHECK(chunks[3] == Chunk{1, 0, 4, 2});
}

TEST_CASE("busy rules differ exactly at the bound") {
  CHECK(is_busy(3, 3, BusyRule::Inclusive));
  CHECK(!is_busy(2, 3, BusyRule::Inclusive));
  CHECK(!is_busy(3, 3, BusyRule::Strict));
  CHECK(is_busy(4, 3, BusyRule::Strict));
  CHECK(is_busy(0, 0, BusyRule::Inclusive));  // bound zero: always busy
  CHECK(!is_busy(0, 0, BusyRule::Strict));
}

TEST_CASE("pick_path prefers primary, then spills to auxiliaries in order") {
  SendQueues q;
  q.aux.resize(2);

  SUBCASE("primary below the bound") {
    q.primary.occupancy = 1;
    auto c = pick_path(q, 2, 4, BusyRule::Inclusive);
    CHECK(!c.is_aux);
  }
  SUBCASE("primary busy, first auxiliary open") {
    q.primary.occupancy = 2;
    auto c = pick_path(q, 2, 4, BusyRule::Inclusive);
    CHECK(c.is_aux);
    CHECK(c.aux_index == 0);
  }
  SUBCASE("first auxiliary full, second open") {
    q.primary.occupancy = 2;
    q.aux[0].occupancy = 4;
    auto c = pick_path(q, 2, 4, BusyRule::Inclusive);
    CHECK(c.is_aux);
    CHECK(c.aux_index == 1);
  }
  SUBCASE("everything saturated falls back to primary") {
    q.primary.occupancy = 9;
    q.aux[0].occupancy = 4;
    q.aux[1].occupancy = 4;
    auto c = pick_path(q, 2, 4, BusyRule::Inclusive);
    CHECK(!c.is_aux);
  }
  SUBCASE("strict rule admits occupancy equal to the bound") {
    q.primary.occupancy = 2;
    auto c = pick_path(q, 2, 4, BusyRule::Strict);
    CHECK(!c.is_aux);
  }
  SUBCASE("no auxiliaries at all") {
    SendQueues bare;
    bare.primary.occupancy = 100;
    auto c = pick_path(bare, 2, 4, BusyRule::Inclusive);
    CHECK(!c.is_aux);
  }
}
