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

#include "wimesh/topology.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace wimesh {

bool Topology::is_wi(SwitchId s) const {
  return std::binary_search(wi_set.begin(), wi_set.end(), s);
}

int Topology::wi_index(SwitchId s) const {
  auto it = std::lower_bound(wi_set.begin(), wi_set.end(), s);
  if (it == wi_set.end() || *it != s) return -1;
  return static_cast<int>(it - wi_set.begin());
}

Topology build_mesh(int rows, int cols, double die_edge_mm) {
  if (rows < 2 || cols < 2)
    throw ConfigError("mesh requires rows >= 2 and cols >= 2");
  if (die_edge_mm <= 0.0) throw ConfigError("die edge must be positive");

  Topology t;
  t.rows = rows;
  t.cols = cols;
  t.die_edge_mm = die_edge_mm;
  t.subnet_of.assign(rows * cols, -1);

  const double h = t.horizontal_link_mm();
  const double v = t.vertical_link_mm();
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      SwitchId s = t.at(r, c);
      if (c + 1 < cols) t.links.push_back({s, t.at(r, c + 1), h});
      if (r + 1 < rows) t.links.push_back({s, t.at(r + 1, c), v});
    }
  }
  return t;
}

std::pair<int, int> choose_tile_shape(int rows, int cols, int subnet_size) {
  int best_tr = -1, best_tc = -1;
  double best_ratio = std::numeric_limits<double>::infinity();
  for (int tr = 1; tr <= subnet_size; ++tr) {
    if (subnet_size % tr != 0) continue;
    int tc = subnet_size / tr;
    if (tr > rows || tc > cols) continue;
    if (rows % tr != 0 || cols % tc != 0) continue;
    double ratio = static_cast<double>(std::max(tr, tc)) / std::min(tr, tc);
    // Prefer the taller tile on equal aspect ratio.
    if (ratio < best_ratio || (ratio == best_ratio && tr > best_tr)) {
      best_ratio = ratio;
      best_tr = tr;
      best_tc = tc;
    }
  }
  if (best_tr < 0)
    throw ConfigError("subnet size " + std::to_string(subnet_size) +
                      " does not tile a " + std::to_string(rows) + "x" +
                      std::to_string(cols) + " mesh");
  return {best_tr, best_tc};
}

Topology partition_and_place_wis(Topology t, int subnet_size) {
  const int n = t.n_switches();
  if (subnet_size < 1 || n % subnet_size != 0)
    throw ConfigError("subnet size must divide the switch count");
  auto [tr, tc] = choose_tile_shape(t.rows, t.cols, subnet_size);
  t.tile_rows = tr;
  t.tile_cols = tc;
  t.subnet_size = subnet_size;

  const int tiles_per_row = t.cols / tc;
  t.subnet_of.assign(n, -1);
  t.wi_set.clear();

  for (int br = 0; br < t.rows / tr; ++br) {
    for (int bc = 0; bc < tiles_per_row; ++bc) {
      int subnet = br * tiles_per_row + bc;
      // Central switch: minimize the maximum Manhattan hop distance to any
      // switch of the tile; lowest id breaks ties.
      SwitchId best = -1;
      int best_maxd = std::numeric_limits<int>::max();
      for (int r = br * tr; r < (br + 1) * tr; ++r) {
        for (int c = bc * tc; c < (bc + 1) * tc; ++c) {
          t.subnet_of[t.at(r, c)] = subnet;
          int maxd = 0;
          for (int rr = br * tr; rr < (br + 1) * tr; ++rr)
            for (int cc = bc * tc; cc < (bc + 1) * tc; ++cc)
              maxd = std::max(maxd, std::abs(r - rr) + std::abs(c - cc));
          if (maxd < best_maxd ||
              (maxd == best_maxd && t.at(r, c) < best)) {
            best_maxd = maxd;
            best = t.at(r, c);
          }
        }
      }
      t.wi_set.push_back(best);
    }
  }
  std::sort(t.wi_set.begin(), t.wi_set.end());
  return t;
}

std::string describe(const Topology& t) {
  std::ostringstream os;
  os << "mesh " << t.rows << "x" << t.cols << " die " << t.die_edge_mm
     << "mm\n";
  os << "switches " << t.n_switches() << "\n";
  os << "links " << t.links.size() << "\n";
  for (const auto& l : t.links)
    os << "  " << l.a << " -- " << l.b << " len " << l.length_mm << "\n";
  os << "wis " << t.wi_set.size() << ":";
  for (SwitchId w : t.wi_set) os << " " << w;
  os << "\n";
  if (t.subnet_size > 0) {
    os << "subnets size " << t.subnet_size << " tile " << t.tile_rows << "x"
       << t.tile_cols << "\n";
  }
  return os.str();
}

}  // namespace wimesh
