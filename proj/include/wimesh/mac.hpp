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
#include <string>
#include <vector>

#include "wimesh/common.hpp"

namespace wimesh {

enum class Scheme : std::uint8_t {
  Wired,  // no wireless overlay; mesh-only reference
  TMac,
  PSam,
  DSam,
  Racm,  // simplified: usage-based slot redistribution only
};

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Slot allocation. All allocators are pure functions of the shared demand
// snapshot plus queue occupancy, so every WI computes identical slot tables
// from the broadcast slot information.
// ---------------------------------------------------------------------------

// Token baseline: every WI gets a whole-packet slot.
std::vector<long> allocate_tmac(int n_wi, int packet_size_flits);

// Proportional allocation: slot_i = demand_i / sum(demand) * epoch_flits,
// integerized by largest remainder (lowest id wins ties) so the slots sum to
// epoch_flits exactly; equal shares when all demands are zero. WIs with a
// non-empty queue are then raised to at least one flit, taking one at a time
// from the largest allocations. Throws ConfigError when epoch_flits cannot
// cover the floors.
std::vector<long> allocate_psam(const std::vector<long>& demands,
                                long epoch_flits,
                                const std::vector<long>& queue_occupancy);

// Demanded allocation: slot_i = demand_i, raised to 1 for WIs with backlog
// and zero prediction. Returns the slots and the epoch length (their sum).
struct DsamAllocation {
  std::vector<long> slots;
  long epoch_flits;
};
DsamAllocation allocate_dsam(const std::vector<long>& demands,
                             const std::vector<long>& queue_occupancy);

// Simplified reactive redistribution: each WI keeps what it used last epoch
// and the unused remainder is redistributed in proportion to usage (equal
// shares when nothing was used), integerized to sum to epoch_flits, with the
// same starvation floors as P-SAM.
std::vector<long> allocate_racm(const std::vector<long>& prev_usage,
                                const std::vector<long>& prev_slots,
                                long epoch_flits,
                                const std::vector<long>& queue_occupancy);

// Largest-remainder apportionment of `total` units proportional to weights
// (all-equal when the weights sum to zero); lowest index wins remainder
// ties. Exposed for tests.
std::vector<long> largest_remainder_apportion(
    const std::vector<double>& weights, long total);

// ---------------------------------------------------------------------------
// Slot information packet.
// ---------------------------------------------------------------------------

inline constexpr int kSlotInfoType = 0xA;
inline constexpr int kBroadcastWi = 0xF;   // reserved DestWI value
inline constexpr long kMaxDemandField = (1 << 14) - 1;
inline constexpr int kMaxTupleFlits = (1 << 7) - 1;
inline constexpr int kPktIdBits = 5;
inline constexpr std::uint32_t kPktIdMask = (1u << kPktIdBits) - 1;

// (DestWI, PktID, NumFlits): NumFlits flits of packet PktID go to DestWI
// (kBroadcastWi = every WI). Tuple order is transmission order.
struct SlotTuple {
  int dest_wi;      // ring index, or kBroadcastWi
  std::uint32_t pkt_id;  // low kPktIdBits of the packet id
  int num_flits;
};

struct SlotInfoPacket {
  int size_flits = 1;  // including the header flit
  long demand = 0;     // sender's Demand_self
  int src_wi = 0;      // sender's ring index
  std::vector<SlotTuple> tuples;

  long data_flits() const {
    long n = 0;
    for (const auto& t : tuples) n += t.num_flits;
    return n;
  }
};

// Number of 32-bit flits needed for a slot-info packet with n tuples: one
// header flit plus two tuples per following flit.
int slot_info_size_flits(int n_tuples);

// Bit-exact 32-bit-flit codec.
//   flit 0:        [type:4 = 0xA | size:3 | src_wi:5 | demand:14 | rsvd:6]
//   later flits:   two 16-bit tuples [dest_wi:4 | pkt_id:5 | num_flits:7],
//                  high half first; an all-zero half-word is padding.
// Fields are packed most-significant-first. Demand saturates at the field
// width.
std::vector<std::uint32_t> encode_slot_info(const SlotInfoPacket& p);
SlotInfoPacket decode_slot_info(const std::vector<std::uint32_t>& flits);

// ---------------------------------------------------------------------------
// Sleep/wake scheduling.
// ---------------------------------------------------------------------------

// Receiver gating for one foreign slot, in flit airtimes. One contiguous
// wake window spans the first through last tuple destined to the listener
// (broadcast tuples count); interleaved foreign flits keep the receiver on.
struct SleepWake {
  long initial_sleep = 0;
  long wake = 0;
  long post_wake = 0;
};

SleepWake compute_sleep_wake(const SlotInfoPacket& pkt, int my_wi);

// Next slot owner on the virtual ring.
inline int advance_ring(int current_owner, int n_wi) {
  return (current_owner + 1) % n_wi;
}

}  // namespace wimesh
