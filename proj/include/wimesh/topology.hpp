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

#pragma once

#include <string>
#include <vector>

#include "wimesh/common.hpp"

namespace wimesh {

// A bidirectional wired link between two cardinal neighbours.
struct WiredLink {
  SwitchId a;
  SwitchId b;
  double length_mm;
};

// Regular rows x cols mesh on a square die, partitioned into equal
// rectangular subnets, each hosting one wireless interface at a central
// switch of its tile. Immutable once built; shared read-only across runs.
struct Topology {
  int rows = 0;
  int cols = 0;
  double die_edge_mm = 0.0;
  std::vector<WiredLink> links;
  std::vector<SwitchId> wi_set;      // sorted; one per subnet
  std::vector<int> subnet_of;        // switch -> subnet index (-1 if unset)
  int subnet_size = 0;               // 0 until partitioned
  int tile_rows = 0;
  int tile_cols = 0;

  int n_switches() const { return rows * cols; }
  int n_wis() const { return static_cast<int>(wi_set.size()); }
  int row_of(SwitchId s) const { return s / cols; }
  int col_of(SwitchId s) const { return s % cols; }
  SwitchId at(int r, int c) const { return r * cols + c; }
  bool is_wi(SwitchId s) const;
  // Index of `s` within wi_set, -1 if not a WI.
  int wi_index(SwitchId s) const;

  double horizontal_link_mm() const { return die_edge_mm / cols; }
  double vertical_link_mm() const { return die_edge_mm / rows; }
};

// Builds the wired mesh. rows, cols >= 2. Horizontal links have length
// die_edge_mm/cols, vertical ones die_edge_mm/rows.
Topology build_mesh(int rows, int cols, double die_edge_mm);

// Partitions the mesh into near-square rectangular tiles of subnet_size
// switches and places one WI per tile at a central switch (lowest id among
// switches minimizing the maximum intra-tile hop distance). Throws
// ConfigError when subnet_size does not tile the mesh.
Topology partition_and_place_wis(Topology t, int subnet_size);

// Chooses the tile shape for a subnet size: the divisor pair (tile_rows x
// tile_cols) closest to square that tiles the mesh, preferring the taller
// tile on ties (size 8 on an 8x8 mesh -> 4x2). Throws if none exists.
std::pair<int, int> choose_tile_shape(int rows, int cols, int subnet_size);

// Human-readable dump (node count, link list with lengths, WI list) for
// golden-file tests and debugging.
std::string describe(const Topology& t);

}  // namespace wimesh
