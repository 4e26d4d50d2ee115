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

#include "wimesh/mac.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wimesh {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Wired: return "wired";
    case Scheme::TMac: return "tmac";
    case Scheme::PSam: return "psam";
    case Scheme::DSam: return "dsam";
    case Scheme::Racm: return "racm";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "wired") return Scheme::Wired;
  if (name == "tmac") return Scheme::TMac;
  if (name == "psam") return Scheme::PSam;
  if (name == "dsam") return Scheme::DSam;
  if (name == "racm") return Scheme::Racm;
  throw ConfigError("unknown MAC scheme: " + name);
}

std::vector<long> largest_remainder_apportion(
    const std::vector<double>& weights, long total) {
  const size_t n = weights.size();
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<long> out(n, 0);
  std::vector<std::pair<double, size_t>> rema(n);
  long assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    double share = sum > 0.0 ? weights[i] / sum * total
                             : static_cast<double>(total) / n;
    out[i] = static_cast<long>(std::floor(share));
    assigned += out[i];
    rema[i] = {share - std::floor(share), i};
  }
  // Hand the leftover units to the largest fractional remainders; lower
  // index wins ties.
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (long k = 0; k < total - assigned; ++k)
    out[rema[k % n].second] += 1;
  return out;
}

namespace {

// Raise zero slots of backlogged WIs to one flit, taking one at a time from
// the largest allocation (lowest id among equals). Keeps the total intact.
void apply_starvation_floor_conserving(std::vector<long>& slots,
                                       const std::vector<long>& queues,
                                       long epoch_flits) {
  long needy = 0;
  for (size_t i = 0; i < slots.size(); ++i)
    if (queues[i] > 0) ++needy;
  if (epoch_flits < needy)
    throw ConfigError("epoch too short to grant every backlogged WI a slot");
  for (size_t i = 0; i < slots.size(); ++i) {
    if (queues[i] <= 0 || slots[i] > 0) continue;
    size_t donor = 0;
    for (size_t j = 1; j < slots.size(); ++j)
      if (slots[j] > slots[donor]) donor = j;
    if (slots[donor] <= 1)
      throw ConfigError("epoch too short to grant every backlogged WI a slot");
    slots[donor] -= 1;
    slots[i] = 1;
  }
}

}  // namespace

std::vector<long> allocate_tmac(int n_wi, int packet_size_flits) {
  return std::vector<long>(n_wi, packet_size_flits);
}

std::vector<long> allocate_psam(const std::vector<long>& demands,
                                long epoch_flits,
                                const std::vector<long>& queue_occupancy) {
  if (epoch_flits <= 0) throw ConfigError("epoch_flits must be positive");
  std::vector<double> w(demands.begin(), demands.end());
  auto slots = largest_remainder_apportion(w, epoch_flits);
  apply_starvation_floor_conserving(slots, queue_occupancy, epoch_flits);
  return slots;
}

DsamAllocation allocate_dsam(const std::vector<long>& demands,
                             const std::vector<long>& queue_occupancy) {
  DsamAllocation a;
  a.slots = demands;
  for (size_t i = 0; i < a.slots.size(); ++i)
    if (a.slots[i] == 0 && queue_occupancy[i] > 0) a.slots[i] = 1;
  a.epoch_flits = std::accumulate(a.slots.begin(), a.slots.end(), 0L);
  return a;
}

std::vector<long> allocate_racm(const std::vector<long>& prev_usage,
                                const std::vector<long>& prev_slots,
                                long epoch_flits,
                                const std::vector<long>& queue_occupancy) {
  long slot_sum = std::accumulate(prev_slots.begin(), prev_slots.end(), 0L);
  if (slot_sum != epoch_flits)
    throw ConfigError("racm: previous slots must sum to the epoch length");
  // usage_i + unused * usage_i / sum(usage) == usage_i * E_F / sum(usage).
  std::vector<double> w(prev_usage.begin(), prev_usage.end());
  auto slots = largest_remainder_apportion(w, epoch_flits);
  apply_starvation_floor_conserving(slots, queue_occupancy, epoch_flits);
  return slots;
}

int slot_info_size_flits(int n_tuples) {
  return 1 + (n_tuples + 1) / 2;
}

std::vector<std::uint32_t> encode_slot_info(const SlotInfoPacket& p) {
  std::vector<std::uint32_t> flits;
  int size = slot_info_size_flits(static_cast<int>(p.tuples.size()));
  long demand = std::min(p.demand, kMaxDemandField);
  std::uint32_t head = 0;
  head |= static_cast<std::uint32_t>(kSlotInfoType & 0xF) << 28;
  head |= static_cast<std::uint32_t>(size & 0x7) << 25;
  head |= static_cast<std::uint32_t>(p.src_wi & 0x1F) << 20;
  head |= static_cast<std::uint32_t>(demand & 0x3FFF) << 6;
  flits.push_back(head);
  for (size_t i = 0; i < p.tuples.size(); i += 2) {
    std::uint32_t word = 0;
    auto pack = [](const SlotTuple& t) -> std::uint32_t {
      return (static_cast<std::uint32_t>(t.dest_wi & 0xF) << 12) |
             ((t.pkt_id & kPktIdMask) << 7) |
             (static_cast<std::uint32_t>(t.num_flits) & 0x7F);
    };
    word |= pack(p.tuples[i]) << 16;
    if (i + 1 < p.tuples.size()) word |= pack(p.tuples[i + 1]);
    flits.push_back(word);
  }
  return flits;
}

SlotInfoPacket decode_slot_info(const std::vector<std::uint32_t>& flits) {
  if (flits.empty()) throw ProtocolError("empty slot info packet");
  std::uint32_t head = flits[0];
  if (((head >> 28) & 0xF) != kSlotInfoType)
    throw ProtocolError("bad slot info type tag");
  SlotInfoPacket p;
  p.size_flits = static_cast<int>((head >> 25) & 0x7);
  p.src_wi = static_cast<int>((head >> 20) & 0x1F);
  p.demand = static_cast<long>((head >> 6) & 0x3FFF);
  if (p.size_flits != static_cast<int>(flits.size()))
    throw ProtocolError("slot info size field mismatch");
  for (size_t f = 1; f < flits.size(); ++f) {
    for (int half = 1; half >= 0; --half) {
      std::uint32_t v = (flits[f] >> (16 * half)) & 0xFFFF;
      if (v == 0) continue;  // padding
      SlotTuple t;
      t.dest_wi = static_cast<int>((v >> 12) & 0xF);
      t.pkt_id = (v >> 7) & kPktIdMask;
      t.num_flits = static_cast<int>(v & 0x7F);
      p.tuples.push_back(t);
    }
  }
  return p;
}

SleepWake compute_sleep_wake(const SlotInfoPacket& pkt, int my_wi) {
  SleepWake sw;
  long total = pkt.data_flits();
  long pos = 0;
  long first = -1, last = -1;
  for (const auto& t : pkt.tuples) {
    if (t.dest_wi == my_wi || t.dest_wi == kBroadcastWi) {
      if (first < 0) first = pos;
      last = pos + t.num_flits;
    }
    pos += t.num_flits;
  }
  if (first < 0) {
    sw.initial_sleep = total;
  } else {
    sw.initial_sleep = first;
    sw.wake = last - first;
    sw.post_wake = total - last;
  }
  return sw;
}

}  // namespace wimesh
