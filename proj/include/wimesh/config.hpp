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

#include <cstdint>
#include <map>
#include <string>

#include "wimesh/energy.hpp"
#include "wimesh/mac.hpp"
#include "wimesh/predictor.hpp"
#include "wimesh/traffic.hpp"

namespace wimesh {

// Full description of one simulation run. Defaults reproduce the 64-core,
// 8-WI, 32-bit-flit, 64-flit-packet baseline.
struct ExperimentConfig {
  // Topology.
  int rows = 8;
  int cols = 8;
  double die_edge_mm = 20.0;
  int subnet_size = 8;

  // MAC.
  Scheme scheme = Scheme::DSam;
  Weights weights{};                 // tuned PID weights
  long epoch_flits = 0;              // 0: n_wi * packet_size
  bool starvation_floor = true;
  int max_tuples = 6;
  bool predictor_true_mean = false;

  // Traffic.
  TrafficSpec traffic{};
  std::string trace_file;            // replaces synthetic traffic when set

  // Datapath.
  int flit_bits = 32;
  int packet_size_flits = 64;
  int vc_count_wired = 4;
  int vc_depth_wired = 2;
  int wi_vc_count = 8;
  int wi_vc_depth = 0;               // 0: 16 for dynamic MACs, 64 for tmac
  double wireless_hop_weight = 1.0;
  double data_rate_gbps = 16.0;

  // Run control.
  Cycle warmup_cycles = 1000;
  Cycle measure_cycles = 9000;
  std::uint64_t seed = 1;
  bool validate_protocol = false;    // continuous invariant checking
  bool count_idle_listening = true;  // include rx-idle energy in totals
  Cycle blocked_watchdog_cycles = 50000;

  EnergyParams energy{};

  int n_cores() const { return rows * cols; }
  int n_wis() const {
    return scheme == Scheme::Wired ? 0 : n_cores() / subnet_size;
  }
  long effective_epoch_flits() const {
    return epoch_flits > 0
               ? epoch_flits
               : static_cast<long>(n_wis()) * packet_size_flits;
  }
  int effective_wi_vc_depth() const {
    if (wi_vc_depth > 0) return wi_vc_depth;
    return scheme == Scheme::TMac ? 64 : 16;
  }
  // Cycles the shared medium is busy per flit:
  // ceil(flit_bits * clock_GHz / data_rate_Gbps).
  int flit_airtime_cycles() const;

  void validate() const;
  std::uint64_t hash() const;
  std::string canonical_text() const;

  // key = value parsing; later assignments win. Unknown keys are errors.
  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_text(const std::string& text,
                                    const std::string& name = "<config>");
  void apply(const std::string& key, const std::string& value);
};

}  // namespace wimesh
