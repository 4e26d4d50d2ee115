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

#include <algorithm>
#include <set>

#include "doctest.h"
#include "wimesh/topology.hpp"

using namespace wimesh;

TEST_CASE("8x8 mesh on a 20mm die") {
  Topology t = build_mesh(8, 8, 20.0);
  CHECK(t.n_switches() == 64);
  CHECK(t.links.size() == 112);  // 2*64 - 8 - 8
  for (const auto& l : t.links) CHECK(l.length_mm == doctest::Approx(2.5));
}

TEST_CASE("smallest mesh") {
  Topology t = build_mesh(2, 2, 4.0);
  CHECK(t.n_switches() == 4);
  CHECK(t.links.size() == 4);
  for (const auto& l : t.links) CHECK(l.length_mm == doctest::Approx(2.0));
}

TEST_CASE("rectangular 4x8 mesh link lengths") {
  Topology t = build_mesh(4, 8, 16.0);
  CHECK(t.n_switches() == 32);
  CHECK(t.links.size() == 52);  // 2*32 - 4 - 8
  int horizontal = 0, vertical = 0;
  for (const auto& l : t.links) {
    bool same_row = t.row_of(l.a) == t.row_of(l.b);
    if (same_row) {
      ++horizontal;
      CHECK(l.length_mm == doctest::Approx(2.0));  // 16/8
    } else {
      ++vertical;
      CHECK(l.length_mm == doctest::Approx(4.0));  // 16/4
    }
  }
  CHECK(horizontal == 28);
  CHECK(vertical == 24);
}

TEST_CASE("mesh rejects degenerate dimensions") {
  CHECK_THROWS_AS(build_mesh(1, 8, 20.0), ConfigError);
  CHECK_THROWS_AS(build_mesh(8, 1, 20.0), ConfigError);
}

TEST_CASE("total wire length closed form") {
  Topology t = build_mesh(8, 8, 20.0);
  double sum = 0;
  for (const auto& l : t.links) sum += l.length_mm;
  // rows*(cols-1) horizontal links of die/cols plus cols*(rows-1) vertical
  // links of die/rows.
  double expect = 8 * 7 * (20.0 / 8) + 8 * 7 * (20.0 / 8);
  CHECK(sum == doctest::Approx(expect));
}

TEST_CASE("8x8 with subnet size 8 places 8 WIs in 4x2 tiles") {
  Topology t = partition_and_place_wis(build_mesh(8, 8, 20.0), 8);
  CHECK(t.wi_set.size() == 8);
  CHECK(t.tile_rows == 4);
  CHECK(t.tile_cols == 2);
  std::set<int> subnets(t.subnet_of.begin(), t.subnet_of.end());
  CHECK(subnets.size() == 8);
  // Partition property: every subnet has exactly 8 switches.
  for (int sn = 0; sn < 8; ++sn)
    CHECK(std::count(t.subnet_of.begin(), t.subnet_of.end(), sn) == 8);
  // One WI per subnet.
  std::set<int> wi_subnets;
  for (SwitchId w : t.wi_set) wi_subnets.insert(t.subnet_of[w]);
  CHECK(wi_subnets.size() == 8);
}

TEST_CASE("degenerate single subnet") {
  Topology t = partition_and_place_wis(build_mesh(8, 8, 20.0), 64);
  CHECK(t.wi_set.size() == 1);
}

// Brute-force center oracle: enumerate every switch of the tile and pick by
// (max hop distance, id), independently of the implementation.
static SwitchId brute_center(const Topology& t, int subnet) {
  SwitchId best = -1;
  int best_d = 1 << 30;
  for (int s = 0; s < t.n_switches(); ++s) {
    if (t.subnet_of[s] != subnet) continue;
    int maxd = 0;
    for (int o = 0; o < t.n_switches(); ++o) {
      if (t.subnet_of[o] != subnet) continue;
      int d = std::abs(t.row_of(s) - t.row_of(o)) +
              std::abs(t.col_of(s) - t.col_of(o));
      maxd = std::max(maxd, d);
    }
    if (maxd < best_d || (maxd == best_d && s < best)) {
      best_d = maxd;
      best = s;
    }
  }
  return best;
}

TEST_CASE("4x4 mesh subnet 4: WI of tile {0,1,4,5} is switch 0") {
  Topology t = partition_and_place_wis(build_mesh(4, 4, 8.0), 4);
  CHECK(t.wi_set.size() == 4);
  CHECK(t.subnet_of[0] == t.subnet_of[1]);
  CHECK(t.subnet_of[0] == t.subnet_of[4]);
  CHECK(t.subnet_of[0] == t.subnet_of[5]);
  CHECK(brute_center(t, t.subnet_of[0]) == 0);
  CHECK(std::count(t.wi_set.begin(), t.wi_set.end(), 0) == 1);
}

TEST_CASE("WI offsets are translation invariant across tiles") {
  Topology t = partition_and_place_wis(build_mesh(8, 8, 20.0), 8);
  std::set<std::pair<int, int>> offsets;
  for (SwitchId w : t.wi_set) {
    int r = t.row_of(w) % t.tile_rows;
    int c = t.col_of(w) % t.tile_cols;
    offsets.insert({r, c});
  }
  CHECK(offsets.size() == 1);
}

TEST_CASE("placement matches the brute-force center rule everywhere") {
  for (int size : {4, 8, 16, 32}) {
    Topology t = partition_and_place_wis(build_mesh(8, 8, 20.0), size);
    for (size_t i = 0; i < t.wi_set.size(); ++i)
      CHECK(t.wi_set[i] == brute_center(t, t.subnet_of[t.wi_set[i]]));
  }
}

TEST_CASE("non-tileable subnet sizes are rejected") {
  CHECK_THROWS_AS(partition_and_place_wis(build_mesh(8, 8, 20.0), 3),
                  ConfigError);
  CHECK_THROWS_AS(partition_and_place_wis(build_mesh(8, 8, 20.0), 5),
                  ConfigError);
}

TEST_CASE("describe emits a stable header") {
  Topology t = partition_and_place_wis(build_mesh(2, 2, 4.0), 2);
  std::string d = describe(t);
  CHECK(d.find("mesh 2x2 die 4mm") != std::string::npos);
  CHECK(d.find("switches 4") != std::string::npos);
  CHECK(d.find("links 4") != std::string::npos);
  CHECK(d.find("wis 2:") != std::string::npos);
}
