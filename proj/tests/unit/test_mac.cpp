/*
 * Copyright 2025-2026 The wimesh Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <numeric>
#include <random>

#include "doctest.h"
#include "wimesh/mac.hpp"

using namespace wimesh;

TEST_CASE("token baseline allocates one packet per WI") {
  auto slots = allocate_tmac(8, 64);
  REQUIRE(slots.size() == 8);
  for (long s : slots) CHECK(s == 64);
}

TEST_CASE("proportional shares: equal demands split the epoch evenly") {
  std::vector<long> demands(8, 5), queues(8, 0);
  auto slots = allocate_psam(demands, 800, queues);
  for (long s : slots) CHECK(s == 100);
}

TEST_CASE("proportional shares pass through already-integral demands") {
  std::vector<long> demands{40, 10, 10, 10, 10, 10, 5, 5};
  std::vector<long> queues(8, 0);
  auto slots = allocate_psam(demands, 100, queues);
  CHECK(slots == demands);
}

TEST_CASE("largest remainder favors the lowest id on ties") {
  std::vector<long> demands{1, 1, 1};
  auto slots = allocate_psam(demands, 100, {0, 0, 0});
  CHECK(slots == std::vector<long>{34, 33, 33});
  long spread = *std::max_element(slots.begin(), slots.end()) -
                *std::min_element(slots.begin(), slots.end());
  CHECK(spread <= 1);
}

TEST_CASE("P-SAM conserves the epoch over randomized demand vectors") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng() % 14);
    long ef = n + static_cast<long>(rng() % 2000);
    std::vector<long> demands(n), queues(n);
    for (auto& d : demands) d = static_cast<long>(rng() % 200);
    for (auto& q : queues) q = static_cast<long>(rng() % 3);
    auto slots = allocate_psam(demands, ef, queues);
    CHECK(std::accumulate(slots.begin(), slots.end(), 0L) == ef);
    for (int i = 0; i < n; ++i)
      if (queues[i] > 0) CHECK(slots[i] >= 1);
  }
}

TEST_CASE("P-SAM with zero total demand falls back to equal shares") {
  auto slots = allocate_psam({0, 0, 0, 0}, 100, {0, 0, 0, 0});
  CHECK(slots == std::vector<long>{25, 25, 25, 25});
}

TEST_CASE("P-SAM rejects epochs too short for the floors") {
  CHECK_THROWS_AS(allocate_psam({5, 5, 5}, 2, {1, 1, 1}), ConfigError);
}

TEST_CASE("D-SAM slots equal demands and the epoch is their sum") {
  auto a = allocate_dsam({3, 0, 7}, {1, 0, 1});
  CHECK(a.slots == std::vector<long>{3, 0, 7});
  CHECK(a.epoch_flits == 10);
}

TEST_CASE("D-SAM all-zero demand with empty queues yields an empty epoch") {
  auto a = allocate_dsam({0, 0, 0}, {0, 0, 0});
  CHECK(a.slots == std::vector<long>{0, 0, 0});
  CHECK(a.epoch_flits == 0);
}

TEST_CASE("D-SAM starvation floor raises backlogged zero predictions") {
  auto a = allocate_dsam({0, 5}, {3, 0});
  CHECK(a.slots == std::vector<long>{1, 5});
  CHECK(a.epoch_flits == 6);
}

TEST_CASE("D-SAM epoch identity on randomized vectors") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 1000; ++trial) {
    int n = 2 + static_cast<int>(rng() % 14);
    std::vector<long> demands(n), queues(n);
    for (auto& d : demands) d = static_cast<long>(rng() % 300);
    for (auto& q : queues) q = static_cast<long>(rng() % 2);
    auto a = allocate_dsam(demands, queues);
    CHECK(std::accumulate(a.slots.begin(), a.slots.end(), 0L) ==
          a.epoch_flits);
    for (int i = 0; i < n; ++i)
      if (queues[i] > 0) CHECK(a.slots[i] >= 1);
  }
}

TEST_CASE("RACM keeps full usage as a fixed point") {
  std::vector<long> usage{50, 50}, prev{50, 50};
  auto slots = allocate_racm(usage, prev, 100, {1, 1});
  CHECK(slots == std::vector<long>{50, 50});
}

TEST_CASE("RACM redistributes unused capacity toward users") {
  auto slots = allocate_racm({50, 0}, {50, 50}, 100, {1, 1});
  CHECK(slots == std::vector<long>{99, 1});
}

TEST_CASE("RACM with no usage falls back to equal shares") {
  auto slots = allocate_racm({0, 0, 0, 0}, {25, 25, 25, 25}, 100,
                             {0, 0, 0, 0});
  CHECK(slots == std::vector<long>{25, 25, 25, 25});
}

TEST_CASE("RACM validates the previous slot sum") {
  CHECK_THROWS_AS(allocate_racm({0, 0}, {10, 10}, 100, {0, 0}), ConfigError);
}

TEST_CASE("slot info codec round-trips and is bit-exact") {
  SlotInfoPacket p;
  p.src_wi = 5;
  p.demand = 1234;
  p.tuples = {{2, 7, 5}, {4, 3, 3}, {2, 7, 2}};
  p.size_flits = slot_info_size_flits(3);
  CHECK(p.size_flits == 3);

  auto flits = encode_slot_info(p);
  REQUIRE(flits.size() == 3);
  // Header: type 0xA, size 3, src 5, demand 1234.
  // 0xA<<28 | 3<<25 | 5<<20 | 1234<<6.
  CHECK(flits[0] == ((0xAu << 28) | (3u << 25) | (5u << 20) | (1234u << 6)));
  // First tuple flit: (2,7,5) high, (4,3,3) low.
  std::uint32_t t0 = (2u << 12) | (7u << 7) | 5u;
  std::uint32_t t1 = (4u << 12) | (3u << 7) | 3u;
  std::uint32_t t2 = (2u << 12) | (7u << 7) | 2u;
  CHECK(flits[1] == ((t0 << 16) | t1));
  CHECK(flits[2] == (t2 << 16));  // padding low half

  SlotInfoPacket q = decode_slot_info(flits);
  CHECK(q.src_wi == p.src_wi);
  CHECK(q.demand == p.demand);
  REQUIRE(q.tuples.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(q.tuples[i].dest_wi == p.tuples[i].dest_wi);
    CHECK(q.tuples[i].pkt_id == p.tuples[i].pkt_id);
    CHECK(q.tuples[i].num_flits == p.tuples[i].num_flits);
  }
}

TEST_CASE("slot info codec round-trips randomized packets") {
  std::mt19937 rng(29);
  for (int trial = 0; trial < 500; ++trial) {
    SlotInfoPacket p;
    p.src_wi = static_cast<int>(rng() % 16);
    p.demand = static_cast<long>(rng() % (kMaxDemandField + 1));
    int nt = static_cast<int>(rng() % 7);
    for (int i = 0; i < nt; ++i)
      p.tuples.push_back({static_cast<int>(rng() % 16),
                          static_cast<std::uint32_t>(rng() % 32),
                          1 + static_cast<int>(rng() % kMaxTupleFlits)});
    p.size_flits = slot_info_size_flits(nt);
    SlotInfoPacket q = decode_slot_info(encode_slot_info(p));
    CHECK(q.src_wi == p.src_wi);
    CHECK(q.demand == p.demand);
    REQUIRE(q.tuples.size() == p.tuples.size());
    for (size_t i = 0; i < p.tuples.size(); ++i) {
      CHECK(q.tuples[i].dest_wi == p.tuples[i].dest_wi);
      CHECK(q.tuples[i].pkt_id == p.tuples[i].pkt_id);
      CHECK(q.tuples[i].num_flits == p.tuples[i].num_flits);
    }
  }
}

TEST_CASE("demand saturates at the field width") {
  SlotInfoPacket p;
  p.demand = 99999;
  p.size_flits = 1;
  SlotInfoPacket q = decode_slot_info(encode_slot_info(p));
  CHECK(q.demand == kMaxDemandField);
}

TEST_CASE("six tuples pack into a four-flit packet") {
  CHECK(slot_info_size_flits(6) == 4);
  CHECK(slot_info_size_flits(0) == 1);
  CHECK(slot_info_size_flits(1) == 2);
}

TEST_CASE("sleep/wake windowing over the reference tuple list") {
  SlotInfoPacket p;
  p.tuples = {{2, 7, 5}, {4, 3, 3}, {2, 7, 2}};
  SUBCASE("addressed in the middle") {
    auto sw = compute_sleep_wake(p, 4);
    CHECK(sw.initial_sleep == 5);
    CHECK(sw.wake == 3);
    CHECK(sw.post_wake == 2);
  }
  SUBCASE("window spans the interleaved foreign burst") {
    auto sw = compute_sleep_wake(p, 2);
    CHECK(sw.initial_sleep == 0);
    CHECK(sw.wake == 10);
    CHECK(sw.post_wake == 0);
  }
  SUBCASE("not addressed at all") {
    auto sw = compute_sleep_wake(p, 5);
    CHECK(sw.initial_sleep == 10);
    CHECK(sw.wake == 0);
    CHECK(sw.post_wake == 0);
  }
}

TEST_CASE("broadcast tuples wake every listener") {
  SlotInfoPacket p;
  p.tuples = {{1, 0, 4}, {kBroadcastWi, 9, 6}};
  auto sw = compute_sleep_wake(p, 7);
  CHECK(sw.initial_sleep == 4);
  CHECK(sw.wake == 6);
  CHECK(sw.post_wake == 0);
}

TEST_CASE("sleep/wake partition identity holds on random packets") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    SlotInfoPacket p;
    int nt = static_cast<int>(rng() % 7);
    for (int i = 0; i < nt; ++i)
      p.tuples.push_back({static_cast<int>(rng() % 9),
                          static_cast<std::uint32_t>(rng() % 32),
                          1 + static_cast<int>(rng() % 100)});
    for (int me = 0; me < 9; ++me) {
      auto sw = compute_sleep_wake(p, me);
      CHECK(sw.initial_sleep + sw.wake + sw.post_wake == p.data_flits());
      CHECK(sw.initial_sleep >= 0);
      CHECK(sw.wake >= 0);
      CHECK(sw.post_wake >= 0);
    }
  }
}

TEST_CASE("ring order wraps") {
  CHECK(advance_ring(7, 8) == 0);
  CHECK(advance_ring(0, 8) == 1);
  int owner = 0;
  std::vector<int> seen;
  for (int i = 0; i < 8; ++i) {
    seen.push_back(owner);
    owner = advance_ring(owner, 8);
  }
  CHECK(owner == 0);
  CHECK(seen == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7});
}
