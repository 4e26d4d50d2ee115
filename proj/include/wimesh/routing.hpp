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
#include "wimesh/topology.hpp"

namespace wimesh {

// Output ports of a switch. Wired ports are named by direction; WIs have the
// extra wireless port. Local is the ejection channel into the attached core.
enum class Port : std::uint8_t {
  Local = 0,
  North,
  South,
  East,
  West,
  Wireless,
};
inline constexpr int kNumPorts = 6;

const char* port_name(Port p);

// One forwarding entry: output port plus the neighbour switch reached
// through it (== self for Local).
struct Hop {
  Port port = Port::Local;
  SwitchId next = -1;
};

// Tree-based forwarding state shared by every run on a topology. All routes
// follow one shortest-path tree over the hybrid wired+wireless graph, so
// routing is deadlock-free (every path is up*/down* on the tree).
class ForwardingTable {
 public:
  ForwardingTable() = default;

  SwitchId root() const { return root_; }
  int n() const { return n_; }

  Hop next_hop(SwitchId here, SwitchId dest) const {
    return table_[static_cast<size_t>(here) * n_ + dest];
  }

  // Tree distance in hops (wireless edges count 1 hop).
  int distance(SwitchId a, SwitchId b) const {
    return dist_[static_cast<size_t>(a) * n_ + b];
  }

  // Tree neighbours of a switch (the flood adjacency for broadcast).
  const std::vector<Hop>& tree_neighbors(SwitchId s) const {
    return tree_adj_[s];
  }

  // True when (a, b) is a tree edge over the wireless medium; used by a
  // receiving WI to decide whether a physically broadcast flit from `a` is
  // addressed to its subtree.
  bool wireless_tree_edge(SwitchId a, SwitchId b) const;

  // Ports a broadcast flit is copied to at `here` given the port it arrived
  // on: every tree-adjacent port except the arrival one, plus Local unless
  // the packet was injected here. Multiple wireless tree edges collapse into
  // one Wireless entry (a single transmission reaches all of them).
  std::vector<Port> broadcast_ports(SwitchId here, Port arrival) const;

  // Neighbour-precise variant used by the simulator: tree hops at `here`
  // excluding the neighbour the flood arrived from (-1 when injected here).
  // Unlike the port variant this re-enters the wireless medium when `here`
  // has wireless tree edges to other peers than the physical sender.
  std::vector<Hop> broadcast_hops_excluding(SwitchId here,
                                            SwitchId from_neighbor) const;

  // All wireless tree children reached from `here` (for delivery checks).
  std::vector<SwitchId> wireless_tree_peers(SwitchId here) const;

  std::string dump_csv() const;

  friend ForwardingTable build_forwarding(const Topology& t,
                                          double wireless_hop_weight,
                                          std::uint64_t seed);

 private:
  int n_ = 0;
  SwitchId root_ = 0;
  std::vector<Hop> table_;        // n x n
  std::vector<int> dist_;         // n x n tree hop counts
  std::vector<std::vector<Hop>> tree_adj_;
};

// Runs Dijkstra over the mesh plus a clique on wi_set (each wireless edge
// weighted wireless_hop_weight, wired edges weight 1) from a seeded random
// start switch and derives per-switch forwarding entries from the resulting
// shortest-path tree. Path lengths are start-independent; the tree is not.
ForwardingTable build_forwarding(const Topology& t,
                                 double wireless_hop_weight,
                                 std::uint64_t seed);

}  // namespace wimesh
