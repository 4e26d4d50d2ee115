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

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "wimesh/config.hpp"
#include "wimesh/energy.hpp"
#include "wimesh/mac.hpp"
#include "wimesh/predictor.hpp"
#include "wimesh/routing.hpp"
#include "wimesh/topology.hpp"
#include "wimesh/traffic.hpp"

namespace wimesh {

// ---------------------------------------------------------------------------
// Cycle model
// ---------------------------------------------------------------------------
// Switch pipeline: three stages folded as [SA | xbar | ST]; a flit that wins
// switch allocation at cycle t lands in the downstream input VC at cycle t+4
// (3 pipeline cycles + 1 link cycle) and is SA-eligible the same cycle it
// lands. Local ejection and entry into a WI serializer VC take the 3 switch
// cycles only (done at t+3). Heads claim a free downstream VC at SA time;
// buffer space is reserved at SA time and released when the flit pops, so
// credits become visible one cycle after the pop. At most one flit leaves an
// output port per cycle; per-output arbitration is round-robin with a
// rotating per-cycle offset. Zero-load head latency over L links is
// therefore 4L + 3 cycles from injection.
//
// Broadcast packets flood the routing tree. At each divergence the switch
// absorbs arriving flits into per-child relay queues, which compete for
// output ports like VCs but are never back-pressured, so broadcast forking
// cannot deadlock the wormhole network. A WI accepts a physically broadcast
// wireless flit only when the sender is its tree neighbour toward the
// packet's source, which delivers each broadcast exactly once per core.
//
// Energy events: a flit crossing a switch costs e_switch_per_flit plus, for
// wired output ports, flit_bits * link_mm * e_wire_per_bit_mm (ejection and
// serializer entry charge the switch term only). Each wireless flit
// (control or data) costs flit_bits * e_wireless_per_bit plus airtime *
// p_tx_on. Receivers pay p_rx_on per awake cycle, classified wake (inside a
// scheduled window) or idle (control listening / always-on schemes).
// Leakage and MAC-unit power accrue every cycle.
// ---------------------------------------------------------------------------

struct Flit {
  PacketId packet_id = 0;
  SwitchId src = -1;
  int dest = -1;  // core id or kBroadcastDest
  int seq = 0;
  int packet_size = 1;
  Cycle birth = 0;

  bool is_head() const { return seq == 0; }
  bool is_tail() const { return seq == packet_size - 1; }
};

// Why announcements stopped short of the slot budget (per-run totals).
struct AnnounceDiag {
  long slots = 0;
  long skip_pkt5 = 0;
  long skip_receiver_cap = 0;
  long budget_bound = 0;
  long buffer_bound = 0;
  long tuple_bound = 0;
};

struct SimResult {
  RunSummary summary;
  // Per-WI demand series sampled on a fixed cycle window (tuner hook).
  std::vector<std::vector<long>> demand_windows;
  Cycle cycles_run = 0;
  // Final ledger for detailed assertions in tests.
  std::shared_ptr<const MetricsLedger> ledger;
  double energy_class_j[static_cast<int>(EnergyClass::kCount)] = {};
  AnnounceDiag announce;
};

class Simulation {
 public:
  explicit Simulation(const ExperimentConfig& cfg);
  ~Simulation();

  // Samples per-WI wireless demand on a fixed window (cycles) for tuner
  // training sets; call before run().
  void enable_demand_sampling(Cycle window_cycles);

  SimResult run();

  const Topology& topology() const;
  const ForwardingTable& forwarding() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Builds, runs and summarizes one configuration.
SimResult run_simulation(const ExperimentConfig& cfg);

}  // namespace wimesh
