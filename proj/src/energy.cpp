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

#include "wimesh/energy.hpp"

#include <cstdio>
#include <sstream>

namespace wimesh {

const char* energy_class_name(EnergyClass c) {
  switch (c) {
    case EnergyClass::SwitchHop: return "switch_hop";
    case EnergyClass::Wire: return "wire";
    case EnergyClass::WirelessTx: return "wireless_tx";
    case EnergyClass::RxWake: return "rx_wake";
    case EnergyClass::RxIdle: return "rx_idle";
    case EnergyClass::MacStatic: return "mac_static";
    case EnergyClass::Leakage: return "leakage";
    default: return "?";
  }
}

double MetricsLedger::energy_class_sum_j() const {
  double s = 0.0;
  for (const auto& k : by_class_) s += k.value();
  return s;
}

RunSummary summarize(const MetricsLedger& ledger, int n_cores,
                     Cycle measured_cycles, double clock_ghz) {
  RunSummary s;
  s.measured_cycles = measured_cycles;
  s.injected_packets = ledger.injected_packets();
  s.delivered_packets = ledger.delivered_packets();
  s.delivered_bits = ledger.delivered_bits();
  double seconds = measured_cycles * 1e-9 / clock_ghz;
  s.bandwidth_per_core_bps =
      seconds > 0.0
          ? static_cast<double>(ledger.delivered_bits()) / seconds / n_cores
          : 0.0;
  if (ledger.delivered_packets() > 0) {
    s.avg_latency_cycles =
        ledger.latency_sum() / ledger.delivered_packets();
    s.packet_energy_j =
        ledger.energy_total_j() / ledger.delivered_packets();
  }
  if (ledger.allocated_slot_flits() > 0) {
    s.wasted_slot_fraction =
        static_cast<double>(ledger.allocated_slot_flits() -
                            ledger.used_slot_flits()) /
        static_cast<double>(ledger.allocated_slot_flits());
  }
  s.allocated_slot_flits = ledger.allocated_slot_flits();
  s.used_slot_flits = ledger.used_slot_flits();
  s.energy_total_j = ledger.energy_total_j();
  s.wireless_data_flits = ledger.wireless_data_flits();
  s.blocked_receive_events = ledger.blocked_receive_events();
  s.max_deserializer_depth = ledger.max_deserializer_depth();
  return s;
}

static std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string RunSummary::csv_header() {
  return "config_hash,seed,scheme,pattern,temporal,load,measured_cycles,"
         "injected_packets,delivered_packets,delivered_bits,"
         "bandwidth_per_core_bps,avg_latency_cycles,packet_energy_j,"
         "wasted_slot_fraction,energy_total_j,wireless_data_flits,"
         "blocked_receive_events,max_deserializer_depth";
}

std::string RunSummary::csv_row() const {
  std::ostringstream os;
  char hash[20];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash));
  os << hash << "," << seed << "," << scheme_name(scheme) << "," << pattern
     << "," << temporal << "," << fmt(load) << "," << measured_cycles << ","
     << injected_packets << "," << delivered_packets << "," << delivered_bits
     << "," << fmt(bandwidth_per_core_bps) << ","
     << (avg_latency_cycles ? fmt(*avg_latency_cycles) : "na") << ","
     << (packet_energy_j ? fmt(*packet_energy_j) : "na") << ","
     << (wasted_slot_fraction ? fmt(*wasted_slot_fraction) : "na") << ","
     << fmt(energy_total_j) << "," << wireless_data_flits << ","
     << blocked_receive_events << "," << max_deserializer_depth;
  return os.str();
}

}  // namespace wimesh
