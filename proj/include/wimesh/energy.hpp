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

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wimesh/common.hpp"
#include "wimesh/mac.hpp"

namespace wimesh {

// Energy and power constants annotated into the simulation. The wireless
// transceiver energy and the MAC-unit powers come from published
// measurements; wired link and switch numbers are documented placeholders,
// so absolute packet energies are parameter-relative while MAC-vs-MAC
// comparisons hold them fixed.
struct EnergyParams {
  double e_switch_per_flit_pj = 2.0;
  double e_wire_per_bit_mm_pj = 0.15;
  double e_wireless_per_bit_pj = 2.06;
  double p_rx_on_mw = 10.0;
  double p_tx_on_mw = 0.0;  // transmit energy is carried by the per-bit term
  double p_leak_switch_mw = 0.5;
  double clock_ghz = 2.5;

  // Per-WI MAC-unit power by scheme (mW). The reactive scheme carries the
  // P-SAM allocation and sleep/wake blocks but no prediction unit.
  double mac_unit_mw(Scheme s) const {
    switch (s) {
      case Scheme::PSam: return 0.373;
      case Scheme::DSam: return 0.286;
      case Scheme::Racm: return 0.225;
      default: return 0.0;
    }
  }

  double cycle_seconds() const { return 1e-9 / clock_ghz; }
};

enum class EnergyClass : int {
  SwitchHop = 0,   // crossbar+buffer traversal, per flit
  Wire,            // wired link, per flit-bit-mm
  WirelessTx,      // transceiver per-bit plus tx-on time
  RxWake,          // receiver on inside a scheduled wake window
  RxIdle,          // receiver on outside wake windows (control, always-on)
  MacStatic,       // prediction/allocation/sleep-wake unit power
  Leakage,         // switch leakage
  kCount,
};

const char* energy_class_name(EnergyClass c);

// Per-run accumulation of delivered traffic, latency samples, energy by
// class and slot usage. One ledger per run; read-only after the run.
class MetricsLedger {
 public:
  void record_energy(EnergyClass c, double joules) {
    by_class_[static_cast<int>(c)].add(joules);
    total_.add(joules);
  }

  void record_delivery(long bits, Cycle latency_cycles) {
    delivered_packets_ += 1;
    delivered_bits_ += bits;
    latency_sum_ += static_cast<double>(latency_cycles);
  }

  void record_slot(long allocated_flits, long used_flits) {
    allocated_slot_flits_ += allocated_flits;
    used_slot_flits_ += used_flits;
    if (allocated_flits > 0 && used_flits == 0) ++empty_slots_;
    ++slot_grants_;
  }

  void count_injected_packet() { ++injected_packets_; }
  void count_injected_flit() { ++injected_flits_; }
  void count_wireless_data_flit() { ++wireless_data_flits_; }
  void count_wireless_control_flit() { ++wireless_control_flits_; }
  void count_blocked_receive() { ++blocked_receive_events_; }
  void note_deserializer_depth(size_t d) {
    if (d > max_deserializer_depth_) max_deserializer_depth_ = d;
  }

  double energy_total_j() const { return total_.value(); }
  double energy_class_j(EnergyClass c) const {
    return by_class_[static_cast<int>(c)].value();
  }
  double energy_class_sum_j() const;

  long delivered_packets() const { return delivered_packets_; }
  long long delivered_bits() const { return delivered_bits_; }
  long injected_packets() const { return injected_packets_; }
  long long injected_flits() const { return injected_flits_; }
  double latency_sum() const { return latency_sum_; }
  long long allocated_slot_flits() const { return allocated_slot_flits_; }
  long long used_slot_flits() const { return used_slot_flits_; }
  long slot_grants() const { return slot_grants_; }
  long empty_slots() const { return empty_slots_; }
  long long wireless_data_flits() const { return wireless_data_flits_; }
  long long wireless_control_flits() const { return wireless_control_flits_; }
  long blocked_receive_events() const { return blocked_receive_events_; }
  size_t max_deserializer_depth() const { return max_deserializer_depth_; }

 private:
  std::array<KahanSum, static_cast<int>(EnergyClass::kCount)> by_class_{};
  KahanSum total_{};
  long delivered_packets_ = 0;
  long long delivered_bits_ = 0;
  double latency_sum_ = 0.0;
  long injected_packets_ = 0;
  long long injected_flits_ = 0;
  long long allocated_slot_flits_ = 0;
  long long used_slot_flits_ = 0;
  long slot_grants_ = 0;
  long empty_slots_ = 0;
  long long wireless_data_flits_ = 0;
  long long wireless_control_flits_ = 0;
  long blocked_receive_events_ = 0;
  size_t max_deserializer_depth_ = 0;
};

// Headline per-run metrics. Undefined quantities (no deliveries, no slots)
// are empty optionals and print as "na".
struct RunSummary {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Wired;
  std::string pattern;
  std::string temporal;
  double load = 0.0;
  Cycle measured_cycles = 0;
  long injected_packets = 0;
  long delivered_packets = 0;
  long long delivered_bits = 0;
  double bandwidth_per_core_bps = 0.0;
  std::optional<double> avg_latency_cycles;
  std::optional<double> packet_energy_j;
  std::optional<double> wasted_slot_fraction;
  long long allocated_slot_flits = 0;
  long long used_slot_flits = 0;
  double energy_total_j = 0.0;
  long long wireless_data_flits = 0;
  long blocked_receive_events = 0;
  size_t max_deserializer_depth = 0;

  std::string csv_row() const;
  static std::string csv_header();
};

// Condenses a ledger into the headline metrics.
RunSummary summarize(const MetricsLedger& ledger, int n_cores,
                     Cycle measured_cycles, double clock_ghz);

}  // namespace wimesh
