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

#include "wimesh/network.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <set>

namespace wimesh {

namespace {

Port opposite(Port p) {
  switch (p) {
    case Port::North: return Port::South;
    case Port::South: return Port::North;
    case Port::East: return Port::West;
    case Port::West: return Port::East;
    default: throw ProtocolError("opposite() needs a wired port");
  }
}

struct VirtualChannel {
  std::deque<Flit> buf;
  bool allocated = false;
  PacketId pkt = 0;
  Port route_port = Port::Local;
  SwitchId route_next = -1;
  int out_vc = -1;     // claimed downstream VC; -1 until the head wins SA
  long inflight = 0;   // flits en route into this VC (space reserved)
  int depth = 0;

  bool can_take() const {
    return static_cast<long>(buf.size()) + inflight < depth;
  }
};

// Broadcast copies are absorbed into per-branch relay queues that compete
// for output ports like VCs but are never back-pressured.
struct RelayStream {
  PacketId pkt = 0;
  Port out_port = Port::Local;
  SwitchId out_next = -1;  // wired neighbour; -1 for Wireless/Local
  std::deque<Flit> q;
  bool tail_queued = false;
  int out_vc = -1;  // claimed WI serializer VC (Wireless relays only)
  bool done() const { return tail_queued && q.empty(); }
};

struct SwitchUnit {
  std::array<std::vector<VirtualChannel>, kNumPorts> in;
  std::vector<RelayStream> relays;
  long occupancy = 0;  // buffered flits in input VCs (activity hint)
};

struct WiOutVc {
  std::deque<Flit> buf;
  bool allocated = false;
  PacketId pkt = 0;
  int dest = -1;      // core id or kBroadcastDest
  int dest_wi = -1;   // receiving ring index or kBroadcastWi
  long inflight = 0;
  Cycle alloc_cycle = 0;
  bool stream_open = false;  // at least one flit announced, tail not yet
  long announced_cum = 0;    // flits announced over the stream's lifetime

  bool can_take(int depth) const {
    return static_cast<long>(buf.size()) + inflight < depth;
  }
};

struct DeserEntry {
  Flit flit;
  int src_ring;
};

struct WiUnit {
  SwitchId sw = -1;
  int ring = -1;
  std::vector<WiOutVc> out;
  std::map<int, int> in_stream;  // (src_ring << kPktIdBits) | pkt5 -> vc
  std::deque<DeserEntry> deser;
  PredictionUnit pu;
  long window_count = 0;  // demand-sampling hook
  SleepWake gate;
  bool gate_valid = false;
};

enum class MPhase { SlotInfo, Token, Data, Idle };

// One announced tuple plus the bookkeeping needed at slot end.
struct PlanEntry {
  int vc = -1;
  int dest_wi = -1;  // kBroadcastWi for broadcast
  std::uint32_t pkt5 = 0;
  int n = 0;
  bool closes = false;  // tail announced within this tuple
};

struct PacketInfo {
  Cycle birth = 0;
  SwitchId src = -1;
  int dest = -1;
  int size = 0;
  int remaining = 0;  // outstanding tail deliveries
  Cycle last_progress = 0;
  bool in_network = false;
};

struct Arrival {
  enum Kind : std::uint8_t {
    WiredVc,      // land in input VC at sw/in_port/vc
    WiredRelay,   // broadcast flit reaching sw over a wired link
    WirelessRx,   // wireless flit reaching WI to_wi from src_ring
    WiOutLand,    // flit entering serializer VC `vc` at WI to_wi
    LocalDeliver, // ejection at sw completes
  };
  Kind kind;
  Flit flit;
  SwitchId sw = -1;
  Port in_port = Port::Local;
  int vc = -1;
  SwitchId from = -1;
  int to_wi = -1;
  int src_ring = -1;
};

}  // namespace

struct Simulation::Impl {
  ExperimentConfig cfg;
  Topology topo;
  ForwardingTable ft;
  std::unique_ptr<TrafficGen> traffic;
  std::vector<TraceEvent> trace;
  size_t trace_pos = 0;

  std::vector<SwitchUnit> sw;
  std::vector<WiUnit> wi;
  std::vector<int> wi_ring_of_switch;  // -1 for non-WI switches

  // Medium state.
  MPhase phase = MPhase::SlotInfo;
  int owner = 0;
  int phase_flits = 0;
  int flit_in_phase = 0;
  int cycles_left = 0;
  std::vector<PlanEntry> plan;
  size_t plan_idx = 0;
  int plan_sent = 0;  // flits sent within the current tuple
  long slot_alloc = 0;
  long slot_used = 0;
  SlotInfoPacket cur_info;
  std::vector<long> slots;
  std::vector<long> demands_collected;
  std::vector<long> usage_epoch;
  std::vector<long> prev_slots;
  std::vector<int> open_in_streams;
  std::vector<std::set<std::uint32_t>> sender_open5;
  int airtime = 1;
  long epoch_index = 0;

  // Injection.
  struct SourceState {
    std::deque<PacketId> pending;
    PacketId cur = 0;
    bool active = false;
    int next_seq = 0;
    int vc = -1;  // local input VC for the packet being injected
    double accum = 0.0;
  };
  std::vector<SourceState> sources;
  std::vector<PacketInfo> packets;
  std::vector<PacketId> live;

  // Arrival ring buffer; max scheduled delay is 4 cycles.
  std::array<std::vector<Arrival>, 8> arrivals;

  MetricsLedger ledger;
  Cycle now = 0;
  bool measuring = false;
  Cycle warmup = 0;
  Cycle total_cycles = 0;

  // Hooks and validation.
  Cycle demand_window = 0;
  std::vector<std::vector<long>> demand_series;
  std::unordered_map<std::uint64_t, int> expect_seq;  // (pkt, core) -> seq
  long long injected_unicast_flits = 0;
  long long delivered_unicast_flits = 0;
  long long delivered_flits_total = 0;

  explicit Impl(const ExperimentConfig& c) : cfg(c) {
    cfg.validate();
    topo = build_mesh(cfg.rows, cfg.cols, cfg.die_edge_mm);
    if (cfg.scheme != Scheme::Wired)
      topo = partition_and_place_wis(topo, cfg.subnet_size);
    ft = build_forwarding(topo, cfg.wireless_hop_weight, cfg.seed);
    if (cfg.trace_file.empty()) {
      TrafficSpec spec = cfg.traffic;
      spec.seed = cfg.seed;
      if (spec.pattern == Pattern::Hotspot && spec.hotspot_core < 0)
        spec.hotspot_core = topo.wi_set.empty() ? 0 : topo.wi_set.front();
      traffic = std::make_unique<TrafficGen>(spec, topo.n_switches());
    } else {
      trace = load_trace(cfg.trace_file);
    }
    init_network();
    init_medium();
  }

  int n() const { return topo.n_switches(); }
  int n_wi() const { return static_cast<int>(wi.size()); }
  bool wireless_on() const { return n_wi() >= 2; }

  // Token and proportional schemes hold every slot for its full allocated
  // duration (unused remainder idles the medium); the demanded scheme
  // advances as soon as the announced flits are through.
  bool strict_slots() const { return cfg.scheme != Scheme::DSam; }

  // Demand is counted where flits enter the WI switch already routed toward
  // the wireless port: the unit tracks what the WI needs to transmit, not
  // what the medium managed to serve.
  void count_demand(SwitchId at, long flits = 1) {
    int ring = wi_ring_of_switch[at];
    if (ring < 0) return;
    wi[ring].pu.add_demand(flits);
    wi[ring].window_count += flits;
  }

  void init_network() {
    sw.assign(n(), SwitchUnit{});
    wi_ring_of_switch.assign(n(), -1);
    for (int s = 0; s < n(); ++s) {
      for (int p = 0; p < kNumPorts; ++p) {
        Port port = static_cast<Port>(p);
        bool is_wl = port == Port::Wireless;
        if (is_wl && !topo.is_wi(s)) continue;
        int count = is_wl ? cfg.wi_vc_count : cfg.vc_count_wired;
        int depth = is_wl ? cfg.effective_wi_vc_depth() : cfg.vc_depth_wired;
        sw[s].in[p].resize(count);
        for (auto& v : sw[s].in[p]) v.depth = depth;
      }
    }
    wi.clear();
    for (size_t i = 0; i < topo.wi_set.size(); ++i) {
      WiUnit u;
      u.sw = topo.wi_set[i];
      u.ring = static_cast<int>(i);
      u.pu = PredictionUnit(cfg.predictor_true_mean);
      u.out.resize(cfg.wi_vc_count);
      wi.push_back(std::move(u));
      wi_ring_of_switch[topo.wi_set[i]] = static_cast<int>(i);
    }
    sources.assign(n(), SourceState{});
  }

  void init_medium() {
    if (!wireless_on()) return;
    airtime = cfg.flit_airtime_cycles();
    demands_collected.assign(n_wi(), 0);
    usage_epoch.assign(n_wi(), 0);
    open_in_streams.assign(n_wi(), 0);
    sender_open5.assign(n_wi(), {});
    prev_slots = largest_remainder_apportion(
        std::vector<double>(n_wi(), 1.0), cfg.effective_epoch_flits());
    compute_epoch_slots();
    owner = 0;
    start_slot();
  }

  // --------------------------------------------------------------------
  // Slot allocation at epoch boundaries.
  // --------------------------------------------------------------------

  std::vector<long> wi_queue_occupancy() const {
    std::vector<long> q(n_wi(), 0);
    for (int i = 0; i < n_wi(); ++i)
      for (const auto& v : wi[i].out)
        q[i] += static_cast<long>(v.buf.size()) + v.inflight;
    return q;
  }

  void compute_epoch_slots() {
    std::vector<long> queues = cfg.starvation_floor
                                   ? wi_queue_occupancy()
                                   : std::vector<long>(n_wi(), 0);
    switch (cfg.scheme) {
      case Scheme::TMac:
        slots = allocate_tmac(n_wi(), cfg.packet_size_flits);
        break;
      case Scheme::PSam:
        slots = allocate_psam(demands_collected, cfg.effective_epoch_flits(),
                              queues);
        break;
      case Scheme::DSam:
        slots = allocate_dsam(demands_collected, queues).slots;
        break;
      case Scheme::Racm:
        slots = allocate_racm(usage_epoch, prev_slots,
                              cfg.effective_epoch_flits(), queues);
        break;
      default:
        break;
    }
    if (cfg.validate_protocol && cfg.starvation_floor) {
      auto queues_now = wi_queue_occupancy();
      for (int i = 0; i < n_wi(); ++i)
        if (queues[i] > 0 && slots[i] < 1)
          throw ProtocolError("starvation floor violated at allocation");
    }
  }

  void epoch_boundary() {
    ++epoch_index;
    if (cfg.scheme != Scheme::TMac) {
      for (auto& u : wi) u.pu.end_of_epoch(cfg.weights);
      compute_epoch_slots();
      prev_slots = slots;
      std::fill(demands_collected.begin(), demands_collected.end(), 0);
    }
    std::fill(usage_epoch.begin(), usage_epoch.end(), 0);
  }

  // --------------------------------------------------------------------
  // Announcement (slot information packet construction).
  // --------------------------------------------------------------------

  // Receivers holding an input VC for a newly opened unicast stream.
  bool can_open_unicast(int dest_wi) const {
    return open_in_streams[dest_wi] < cfg.wi_vc_count;
  }

  // Announce diagnostics (aggregated per run, dumped by probes/tests).
  long dbg_skip_pkt5 = 0, dbg_skip_cap = 0, dbg_budget_bound = 0,
       dbg_buffer_bound = 0, dbg_tuple_bound = 0, dbg_slots_total = 0;

  void build_plan_dynamic() {
    WiUnit& u = wi[owner];
    long budget = slots[owner];
    plan.clear();
    cur_info = SlotInfoPacket{};
    cur_info.src_wi = owner;
    cur_info.demand = u.pu.demand_self();

    // Age order: oldest allocated packet first, lower vc index on ties.
    std::vector<int> order;
    for (int v = 0; v < static_cast<int>(u.out.size()); ++v)
      if (!u.out[v].buf.empty()) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (u.out[a].alloc_cycle != u.out[b].alloc_cycle)
        return u.out[a].alloc_cycle < u.out[b].alloc_cycle;
      return a < b;
    });

    ++dbg_slots_total;
    for (int v : order) {
      if (budget <= 0) {
        ++dbg_budget_bound;
        break;
      }
      if (static_cast<int>(plan.size()) >= cfg.max_tuples) {
        ++dbg_tuple_bound;
        break;
      }
      WiOutVc& vc = u.out[v];
      std::uint32_t pkt5 = vc.pkt & kPktIdMask;
      if (!vc.stream_open) {
        if (sender_open5[owner].count(pkt5)) {
          ++dbg_skip_pkt5;
          continue;  // id ambiguity
        }
        if (vc.dest_wi != kBroadcastWi && !can_open_unicast(vc.dest_wi)) {
          ++dbg_skip_cap;
          continue;  // receiver VC bank exhausted; defer
        }
      }
      long avail = static_cast<long>(vc.buf.size());
      long already = 0;
      while (avail > 0 && budget > 0 &&
             static_cast<int>(plan.size()) < cfg.max_tuples) {
        int take = static_cast<int>(
            std::min({avail, budget, static_cast<long>(kMaxTupleFlits)}));
        PlanEntry pe;
        pe.vc = v;
        pe.dest_wi = vc.dest_wi;
        pe.pkt5 = pkt5;
        pe.n = take;
        // The stream closes when the announced range reaches the tail.
        long last_seq = vc.buf.front().seq + already + take - 1;
        pe.closes = (last_seq == vc.buf.front().packet_size - 1);
        plan.push_back(pe);
        cur_info.tuples.push_back({pe.dest_wi, pe.pkt5, pe.n});
        avail -= take;
        already += take;
        budget -= take;
        if (pe.closes) break;
      }
      if (already > 0 && !vc.stream_open) {
        vc.stream_open = true;
        sender_open5[owner].insert(pkt5);
        if (vc.dest_wi != kBroadcastWi) open_in_streams[vc.dest_wi] += 1;
      }
    }
    if (budget > 0 && static_cast<int>(plan.size()) < cfg.max_tuples)
      ++dbg_buffer_bound;
    cur_info.size_flits =
        slot_info_size_flits(static_cast<int>(cur_info.tuples.size()));
  }

  void build_plan_tmac() {
    WiUnit& u = wi[owner];
    plan.clear();
    int best = -1;
    for (int v = 0; v < static_cast<int>(u.out.size()); ++v) {
      const WiOutVc& vc = u.out[v];
      if (vc.buf.size() == static_cast<size_t>(cfg.packet_size_flits) &&
          vc.buf.front().seq == 0) {
        if (best < 0 || vc.alloc_cycle < u.out[best].alloc_cycle) best = v;
      }
    }
    if (best >= 0) {
      const WiOutVc& vc = u.out[best];
      PlanEntry pe;
      pe.vc = best;
      pe.dest_wi = vc.dest_wi;
      pe.pkt5 = vc.pkt & kPktIdMask;
      pe.n = cfg.packet_size_flits;
      pe.closes = true;
      plan.push_back(pe);
    }
  }

  void start_slot() {
    plan_idx = 0;
    plan_sent = 0;
    slot_used = 0;
    flit_in_phase = 0;
    cycles_left = airtime;
    if (cfg.scheme == Scheme::TMac) {
      build_plan_tmac();
      slot_alloc = cfg.packet_size_flits;
      phase = MPhase::Token;
      phase_flits = 1;
    } else {
      slot_alloc = slots[owner];
      build_plan_dynamic();
      phase = MPhase::SlotInfo;
      phase_flits = cur_info.size_flits;
    }
  }

  long plan_total_flits() const {
    long t = 0;
    for (const auto& pe : plan) t += pe.n;
    return t;
  }

  void parse_slot_info_at_receivers() {
    // Bit-exact codec exercised on the live path.
    SlotInfoPacket decoded = decode_slot_info(encode_slot_info(cur_info));
    demands_collected[decoded.src_wi] = decoded.demand;
    long total = decoded.data_flits();
    for (auto& u : wi) {
      if (u.ring == owner) continue;
      u.gate = compute_sleep_wake(decoded, u.ring);
      u.gate_valid = true;
      if (cfg.validate_protocol &&
          u.gate.initial_sleep + u.gate.wake + u.gate.post_wake != total)
        throw ProtocolError("sleep/wake partition mismatch");
    }
  }

  void end_slot() {
    if (measuring) ledger.record_slot(slot_alloc, slot_used);
    usage_epoch[owner] += slot_used;
    // Close announced-to-tail streams.
    WiUnit& u = wi[owner];
    for (const auto& pe : plan) {
      if (!pe.closes) continue;
      sender_open5[owner].erase(pe.pkt5);
      if (pe.dest_wi != kBroadcastWi) open_in_streams[pe.dest_wi] -= 1;
      u.out[pe.vc].stream_open = false;
      u.out[pe.vc].announced_cum = 0;
    }
    if (cfg.validate_protocol) {
      if (plan_idx != plan.size())
        throw ProtocolError("slot ended before announced flits were sent");
    }
    owner = advance_ring(owner, n_wi());
    if (owner == 0) epoch_boundary();
    start_slot();
  }

  // --------------------------------------------------------------------
  // Wireless transmission and reception.
  // --------------------------------------------------------------------

  void charge_wireless_flit(bool control) {
    if (!measuring) return;
    double pj = cfg.flit_bits * cfg.energy.e_wireless_per_bit_pj;
    double tx_on = airtime * cfg.energy.p_tx_on_mw * 1e-3 *
                   cfg.energy.cycle_seconds();
    ledger.record_energy(EnergyClass::WirelessTx, pj * 1e-12 + tx_on);
    if (control)
      ledger.count_wireless_control_flit();
    else
      ledger.count_wireless_data_flit();
  }

  void schedule(Cycle at, Arrival a) {
    arrivals[at & 7].push_back(std::move(a));
  }

  void progress(PacketId pkt) { packets[pkt].last_progress = now; }

  void transmit_data_flit() {
    PlanEntry& pe = plan[plan_idx];
    WiUnit& u = wi[owner];
    WiOutVc& vc = u.out[pe.vc];
    if (vc.buf.empty())
      throw ProtocolError("announced more flits than buffered");
    if ((vc.buf.front().packet_id & kPktIdMask) != pe.pkt5)
      throw ProtocolError("announced tuple does not match serializer state");
    Flit fl = vc.buf.front();
    vc.buf.pop_front();
    vc.announced_cum += 1;
    charge_wireless_flit(false);
    slot_used += 1;
    progress(fl.packet_id);
    if (fl.is_tail()) {
      vc.allocated = false;
      vc.stream_open = false;
      vc.announced_cum = 0;
      if (cfg.validate_protocol && !vc.buf.empty())
        throw ProtocolError("flits behind a tail in a serializer VC");
    }
    if (pe.dest_wi == kBroadcastWi) {
      for (auto& r : wi) {
        if (r.ring == owner) continue;
        if (ft.next_hop(r.sw, fl.src).next == u.sw) {
          Arrival a;
          a.kind = Arrival::WirelessRx;
          a.flit = fl;
          a.to_wi = r.ring;
          a.src_ring = owner;
          a.from = u.sw;
          schedule(now + 1, a);
        }
      }
    } else {
      Arrival a;
      a.kind = Arrival::WirelessRx;
      a.flit = fl;
      a.to_wi = pe.dest_wi;
      a.src_ring = owner;
      a.from = u.sw;
      schedule(now + 1, a);
    }
    ++plan_sent;
    if (plan_sent == pe.n) {
      ++plan_idx;
      plan_sent = 0;
    }
  }

  void medium_tick() {
    if (!wireless_on()) return;
    --cycles_left;
    charge_listeners();
    if (cycles_left > 0) return;
    // Current flit completes now.
    switch (phase) {
      case MPhase::Token:
        charge_wireless_flit(true);
        ++flit_in_phase;
        if (plan.empty()) {
          end_slot();
          return;
        }
        phase = MPhase::Data;
        phase_flits = static_cast<int>(plan_total_flits());
        flit_in_phase = 0;
        cycles_left = airtime;
        return;
      case MPhase::SlotInfo:
        charge_wireless_flit(true);
        ++flit_in_phase;
        if (flit_in_phase < phase_flits) {
          cycles_left = airtime;
          return;
        }
        parse_slot_info_at_receivers();
        if (plan.empty()) {
          end_slot();
          return;
        }
        phase = MPhase::Data;
        phase_flits = static_cast<int>(plan_total_flits());
        flit_in_phase = 0;
        cycles_left = airtime;
        return;
      case MPhase::Data:
        transmit_data_flit();
        ++flit_in_phase;
        if (flit_in_phase >= phase_flits) {
          end_slot();
          return;
        }
        cycles_left = airtime;
        return;
    }
  }

  // Receiver power accounting for the current cycle.
  void charge_listeners() {
    if (!measuring) return;
    double e_cycle =
        cfg.energy.p_rx_on_mw * 1e-3 * cfg.energy.cycle_seconds();
    if (cfg.scheme == Scheme::TMac) {
      // Baseline transceivers have no sleep circuitry: all receivers on.
      ledger.record_energy(EnergyClass::RxIdle, e_cycle * n_wi());
      return;
    }
    for (const auto& u : wi) {
      if (u.ring == owner) continue;
      if (phase == MPhase::SlotInfo) {
        ledger.record_energy(EnergyClass::RxIdle, e_cycle);
      } else if (phase == MPhase::Data) {
        long k = flit_in_phase;
        if (u.gate_valid && k >= u.gate.initial_sleep &&
            k < u.gate.initial_sleep + u.gate.wake)
          ledger.record_energy(EnergyClass::RxWake, e_cycle);
      }
    }
  }

  // --------------------------------------------------------------------
  // Wireless receive path.
  // --------------------------------------------------------------------

  bool try_accept_wireless(WiUnit& u, const DeserEntry& e, bool count_block) {
    const Flit& fl = e.flit;
    if (fl.dest == kBroadcastDest) {
      intake_broadcast(u.sw, fl, wi[e.src_ring].sw);
      return true;
    }
    int key = (e.src_ring << kPktIdBits) |
              static_cast<int>(fl.packet_id & kPktIdMask);
    auto& vcs = sw[u.sw].in[static_cast<int>(Port::Wireless)];
    auto it = u.in_stream.find(key);
    if (it == u.in_stream.end()) {
      if (fl.seq != 0)
        throw ProtocolError("wireless body flit with no mapped stream");
      int free = -1;
      for (int v = 0; v < static_cast<int>(vcs.size()); ++v)
        if (!vcs[v].allocated && vcs[v].buf.empty()) {
          free = v;
          break;
        }
      if (free < 0) {
        if (count_block) ledger.count_blocked_receive();
        return false;
      }
      VirtualChannel& vc = vcs[free];
      vc.allocated = true;
      vc.pkt = fl.packet_id;
      Hop h = ft.next_hop(u.sw, fl.dest);
      vc.route_port = h.port;
      vc.route_next = h.next;
      vc.out_vc = -1;
      vc.buf.push_back(fl);
      sw[u.sw].occupancy += 1;
      if (vc.route_port == Port::Wireless) count_demand(u.sw);
      if (fl.is_tail()) {
        // single-flit packet: nothing more will arrive on this stream
      } else {
        u.in_stream[key] = free;
      }
      progress(fl.packet_id);
      return true;
    }
    VirtualChannel& vc = vcs[it->second];
    if (static_cast<long>(vc.buf.size()) >= vc.depth) return false;
    vc.buf.push_back(fl);
    sw[u.sw].occupancy += 1;
    if (vc.route_port == Port::Wireless) count_demand(u.sw);
    if (fl.is_tail()) u.in_stream.erase(it);
    progress(fl.packet_id);
    return true;
  }

  void drain_deserializer(WiUnit& u) {
    while (!u.deser.empty()) {
      if (!try_accept_wireless(u, u.deser.front(), false)) break;
      u.deser.pop_front();
    }
    ledger.note_deserializer_depth(u.deser.size());
  }

  void wireless_rx_commit(const Arrival& a) {
    WiUnit& u = wi[a.to_wi];
    DeserEntry e{a.flit, a.src_ring};
    if (!u.deser.empty() || !try_accept_wireless(u, e, true)) {
      u.deser.push_back(e);
      ledger.note_deserializer_depth(u.deser.size());
    }
  }

  // --------------------------------------------------------------------
  // Broadcast relays.
  // --------------------------------------------------------------------

  void intake_broadcast(SwitchId at, const Flit& fl, SwitchId from) {
    SwitchUnit& s = sw[at];
    if (fl.is_head()) {
      SwitchId exclude = from < 0 ? -1 : ft.next_hop(at, fl.src).next;
      bool wireless_done = false;
      for (const Hop& h : ft.broadcast_hops_excluding(at, exclude)) {
        if (h.port == Port::Wireless) {
          if (wireless_done) continue;
          wireless_done = true;
          RelayStream r;
          r.pkt = fl.packet_id;
          r.out_port = Port::Wireless;
          r.q.push_back(fl);
          s.relays.push_back(std::move(r));
        } else {
          RelayStream r;
          r.pkt = fl.packet_id;
          r.out_port = h.port;
          r.out_next = h.next;
          r.q.push_back(fl);
          s.relays.push_back(std::move(r));
        }
      }
      if (from >= 0) {
        // Local copy for the attached core.
        RelayStream r;
        r.pkt = fl.packet_id;
        r.out_port = Port::Local;
        r.q.push_back(fl);
        s.relays.push_back(std::move(r));
      }
      if (fl.is_tail())
        for (auto& r : s.relays)
          if (r.pkt == fl.packet_id) r.tail_queued = true;
    } else {
      for (auto& r : s.relays) {
        if (r.pkt != fl.packet_id) continue;
        r.q.push_back(fl);
        if (r.out_port == Port::Wireless) count_demand(at);
        if (fl.is_tail()) r.tail_queued = true;
      }
    }
    progress(fl.packet_id);
  }

  // --------------------------------------------------------------------
  // Arrivals, injection, ejection.
  // --------------------------------------------------------------------

  void deliver_local(const Flit& fl, SwitchId at) {
    if (cfg.validate_protocol) {
      std::uint64_t key =
          static_cast<std::uint64_t>(fl.packet_id) * n() + at;
      int& expect = expect_seq[key];
      if (fl.seq != expect)
        throw ProtocolError("out-of-order delivery");
      expect += 1;
      if (fl.is_tail()) expect_seq.erase(key);
    }
    if (fl.dest != kBroadcastDest) delivered_unicast_flits += 1;
    delivered_flits_total += 1;
    progress(fl.packet_id);
    if (fl.is_tail()) {
      PacketInfo& pi = packets[fl.packet_id];
      pi.remaining -= 1;
      if (pi.remaining < 0)
        throw ProtocolError("packet delivered more times than expected");
      // Every in-window delivery counts toward bandwidth and latency, so a
      // backlog of old packets shows up as growing latency, not as vanishing
      // throughput.
      if (measuring) {
        long bits = static_cast<long>(fl.packet_size) * cfg.flit_bits;
        ledger.record_delivery(bits, now - pi.birth);
      }
    }
  }

  void commit_arrival(const Arrival& a) {
    switch (a.kind) {
      case Arrival::WiredVc: {
        VirtualChannel& vc = sw[a.sw].in[static_cast<int>(a.in_port)][a.vc];
        vc.inflight -= 1;
        if (a.flit.is_head()) {
          vc.allocated = true;
          vc.pkt = a.flit.packet_id;
          Hop h = ft.next_hop(a.sw, a.flit.dest);
          vc.route_port = h.port;
          vc.route_next = h.next;
          vc.out_vc = -1;
        }
        vc.buf.push_back(a.flit);
        sw[a.sw].occupancy += 1;
        if (vc.route_port == Port::Wireless) count_demand(a.sw);
        progress(a.flit.packet_id);
        break;
      }
      case Arrival::WiredRelay:
        intake_broadcast(a.sw, a.flit, a.from);
        break;
      case Arrival::WirelessRx:
        wireless_rx_commit(a);
        break;
      case Arrival::WiOutLand: {
        WiOutVc& vc = wi[a.to_wi].out[a.vc];
        vc.inflight -= 1;
        if (vc.buf.empty() && !vc.allocated) {
          vc.allocated = true;
          vc.alloc_cycle = now;
        }
        vc.buf.push_back(a.flit);
        progress(a.flit.packet_id);
        break;
      }
      case Arrival::LocalDeliver:
        deliver_local(a.flit, a.sw);
        break;
    }
  }

  void commit_arrivals() {
    auto& due = arrivals[now & 7];
    for (const Arrival& a : due) commit_arrival(a);
    due.clear();
  }

  PacketId spawn_packet(SwitchId src, int dest, int size) {
    PacketId id = static_cast<PacketId>(packets.size());
    PacketInfo pi;
    pi.birth = now;
    pi.src = src;
    pi.dest = dest;
    pi.size = size;
    pi.remaining = dest == kBroadcastDest ? n() - 1 : 1;
    pi.last_progress = now;
    packets.push_back(pi);
    sources[src].pending.push_back(id);
    if (measuring) ledger.count_injected_packet();
    return id;
  }

  void spawn_traffic() {
    if (traffic) {
      for (int c = 0; c < n(); ++c) {
        if (!traffic->should_inject(c)) continue;
        SourceState& ss = sources[c];
        ss.accum += 1.0;
        if (ss.accum >= cfg.packet_size_flits) {
          ss.accum -= cfg.packet_size_flits;
          int dest = traffic->next_destination(c);
          spawn_packet(c, dest, cfg.packet_size_flits);
        }
      }
    } else {
      while (trace_pos < trace.size() && trace[trace_pos].cycle <= now) {
        const TraceEvent& ev = trace[trace_pos];
        if (ev.source < 0 || ev.source >= n() ||
            (ev.dest != kBroadcastDest && (ev.dest < 0 || ev.dest >= n())))
          throw ConfigError("trace event outside the mesh");
        spawn_packet(ev.source, ev.dest, ev.size_flits);
        ++trace_pos;
      }
    }
  }

  void inject() {
    for (int c = 0; c < n(); ++c) {
      SourceState& ss = sources[c];
      if (!ss.active) {
        if (ss.pending.empty()) continue;
        PacketId id = ss.pending.front();
        const PacketInfo& pi = packets[id];
        if (pi.dest == kBroadcastDest) {
          ss.cur = id;
          ss.active = true;
          ss.next_seq = 0;
          ss.vc = -1;
        } else {
          // claim a free local input VC
          auto& vcs = sw[c].in[static_cast<int>(Port::Local)];
          int free = -1;
          for (int v = 0; v < static_cast<int>(vcs.size()); ++v)
            if (!vcs[v].allocated && vcs[v].buf.empty() &&
                vcs[v].inflight == 0) {
              free = v;
              break;
            }
          if (free < 0) continue;  // back-pressure into the source queue
          ss.cur = id;
          ss.active = true;
          ss.next_seq = 0;
          ss.vc = free;
          VirtualChannel& vc = vcs[free];
          vc.allocated = true;
          vc.pkt = id;
          Hop h = ft.next_hop(c, pi.dest);
          vc.route_port = h.port;
          vc.route_next = h.next;
          vc.out_vc = -1;
        }
        ss.pending.pop_front();
      }
      if (!ss.active) continue;
      PacketInfo& pi = packets[ss.cur];
      Flit fl;
      fl.packet_id = ss.cur;
      fl.src = c;
      fl.dest = pi.dest;
      fl.seq = ss.next_seq;
      fl.packet_size = pi.size;
      fl.birth = pi.birth;
      if (pi.dest == kBroadcastDest) {
        intake_broadcast(c, fl, -1);
      } else {
        VirtualChannel& vc = sw[c].in[static_cast<int>(Port::Local)][ss.vc];
        if (static_cast<long>(vc.buf.size()) >= vc.depth) continue;
        vc.buf.push_back(fl);
        sw[c].occupancy += 1;
        injected_unicast_flits += 1;
        if (vc.route_port == Port::Wireless) count_demand(c);
      }
      if (measuring) ledger.count_injected_flit();
      if (!pi.in_network) {
        pi.in_network = true;
        live.push_back(ss.cur);
      }
      progress(ss.cur);
      ss.next_seq += 1;
      if (ss.next_seq == pi.size) ss.active = false;
    }
  }

  // --------------------------------------------------------------------
  // Switch allocation.
  // --------------------------------------------------------------------

  struct Candidate {
    bool relay;
    Port in_port;  // valid for VCs
    int idx;       // vc index or relay index
  };

  // True when the candidate can move one flit to `out` this cycle; fills
  // claim_vc with the downstream VC to claim when a head must allocate one.
  bool eligible(SwitchId s, Port out, const Candidate& c, int& claim_vc) {
    claim_vc = -1;
    if (c.relay) {
      const RelayStream& r = sw[s].relays[c.idx];
      if (r.q.empty()) return false;
      if (r.out_port != out) return false;
      if (out == Port::Wireless) {
        WiUnit& u = wi[wi_ring_of_switch[s]];
        if (r.out_vc >= 0)
          return u.out[r.out_vc].can_take(cfg.effective_wi_vc_depth());
        int free = -1;
        for (int v = 0; v < static_cast<int>(u.out.size()); ++v)
          if (!u.out[v].allocated && u.out[v].buf.empty() &&
              u.out[v].inflight == 0) {
            free = v;
            break;
          }
        if (free < 0) return false;
        claim_vc = free;
        return true;
      }
      return true;  // wired relay hops and local ejection are uncredited
    }
    const VirtualChannel& vc = sw[s].in[static_cast<int>(c.in_port)][c.idx];
    if (vc.buf.empty()) return false;
    if (vc.route_port != out) return false;
    const Flit& fl = vc.buf.front();
    if (out == Port::Local) return true;
    if (out == Port::Wireless) {
      WiUnit& u = wi[wi_ring_of_switch[s]];
      if (vc.out_vc >= 0)
        return u.out[vc.out_vc].can_take(cfg.effective_wi_vc_depth());
      if (!fl.is_head())
        throw ProtocolError("body flit without serializer VC");
      int free = -1;
      for (int v = 0; v < static_cast<int>(u.out.size()); ++v)
        if (!u.out[v].allocated && u.out[v].buf.empty() &&
            u.out[v].inflight == 0) {
          free = v;
          break;
        }
      if (free < 0) return false;
      claim_vc = free;
      return true;
    }
    // Wired output.
    auto& dvcs = sw[vc.route_next].in[static_cast<int>(opposite(out))];
    if (vc.out_vc >= 0) return dvcs[vc.out_vc].can_take();
    if (!fl.is_head())
      throw ProtocolError("body flit without downstream VC");
    for (int v = 0; v < static_cast<int>(dvcs.size()); ++v)
      if (!dvcs[v].allocated && dvcs[v].buf.empty() &&
          dvcs[v].inflight == 0) {
        claim_vc = v;
        return true;
      }
    return false;
  }

  void charge_hop(SwitchId s, Port out) {
    if (!measuring) return;
    (void)s;
    ledger.record_energy(EnergyClass::SwitchHop,
                         cfg.energy.e_switch_per_flit_pj * 1e-12);
    if (out == Port::Local || out == Port::Wireless) return;
    double len = (out == Port::East || out == Port::West)
                     ? topo.horizontal_link_mm()
                     : topo.vertical_link_mm();
    ledger.record_energy(
        EnergyClass::Wire,
        cfg.flit_bits * len * cfg.energy.e_wire_per_bit_mm_pj * 1e-12);
  }

  void grant(SwitchId s, Port out, const Candidate& c, int claim_vc) {
    Flit fl;
    SwitchId next = -1;
    if (c.relay) {
      RelayStream& r = sw[s].relays[c.idx];
      fl = r.q.front();
      r.q.pop_front();
      next = r.out_next;
      if (out == Port::Wireless && r.out_vc < 0) {
        r.out_vc = claim_vc;
        WiUnit& u = wi[wi_ring_of_switch[s]];
        u.out[claim_vc].allocated = true;
        u.out[claim_vc].pkt = fl.packet_id;
        u.out[claim_vc].dest = kBroadcastDest;
        u.out[claim_vc].dest_wi = kBroadcastWi;
        u.out[claim_vc].alloc_cycle = now;
      }
      if (out == Port::Wireless) {
        WiUnit& u = wi[wi_ring_of_switch[s]];
        u.out[r.out_vc].inflight += 1;
        Arrival a;
        a.kind = Arrival::WiOutLand;
        a.flit = fl;
        a.to_wi = u.ring;
        a.vc = r.out_vc;
        schedule(now + 3, a);
      }
    } else {
      VirtualChannel& vc = sw[s].in[static_cast<int>(c.in_port)][c.idx];
      fl = vc.buf.front();
      vc.buf.pop_front();
      sw[s].occupancy -= 1;
      next = vc.route_next;
      if (out == Port::Wireless) {
        WiUnit& u = wi[wi_ring_of_switch[s]];
        if (vc.out_vc < 0) {
          vc.out_vc = claim_vc;
          WiOutVc& ov = u.out[claim_vc];
          ov.allocated = true;
          ov.pkt = fl.packet_id;
          ov.dest = fl.dest;
          ov.dest_wi = wi_ring_of_switch[vc.route_next];
          ov.alloc_cycle = now;
        }
        u.out[vc.out_vc].inflight += 1;
        Arrival a;
        a.kind = Arrival::WiOutLand;
        a.flit = fl;
        a.to_wi = u.ring;
        a.vc = vc.out_vc;
        schedule(now + 3, a);
      } else if (out == Port::Local) {
        Arrival a;
        a.kind = Arrival::LocalDeliver;
        a.flit = fl;
        a.sw = s;
        schedule(now + 3, a);
      } else {
        if (vc.out_vc < 0) vc.out_vc = claim_vc;
        auto& dvc = sw[next].in[static_cast<int>(opposite(out))][vc.out_vc];
        dvc.inflight += 1;
        if (fl.is_head()) {
          dvc.allocated = true;  // reserve; head fills route on landing
          dvc.pkt = fl.packet_id;
        }
        Arrival a;
        a.kind = Arrival::WiredVc;
        a.flit = fl;
        a.sw = next;
        a.in_port = opposite(out);
        a.vc = vc.out_vc;
        schedule(now + 4, a);
      }
      if (fl.is_tail()) {
        vc.allocated = false;
        vc.out_vc = -1;
        if (cfg.validate_protocol && !vc.buf.empty())
          throw ProtocolError("flits behind a tail in a VC");
      }
    }
    if (c.relay && out != Port::Wireless) {
      // Relay flits over wired links or into the local core.
      if (out == Port::Local) {
        Arrival a;
        a.kind = Arrival::LocalDeliver;
        a.flit = fl;
        a.sw = s;
        schedule(now + 3, a);
      } else {
        Arrival a;
        a.kind = Arrival::WiredRelay;
        a.flit = fl;
        a.sw = next;
        a.from = s;
        schedule(now + 4, a);
      }
    }
    charge_hop(s, out);
    progress(fl.packet_id);
  }

  void switch_alloc() {
    struct Grant {
      SwitchId s;
      Port out;
      Candidate c;
      int claim;
    };
    static thread_local std::vector<Grant> grants;
    grants.clear();
    for (int s = 0; s < n(); ++s) {
      SwitchUnit& su = sw[s];
      if (su.occupancy == 0 && su.relays.empty()) continue;
      for (int p = 0; p < kNumPorts; ++p) {
        Port out = static_cast<Port>(p);
        if (out == Port::Wireless && wi_ring_of_switch[s] < 0) continue;
        // Enumerate candidates: input VCs in port-major order, then relays.
        static thread_local std::vector<Candidate> cands;
        cands.clear();
        for (int ip = 0; ip < kNumPorts; ++ip) {
          auto& vcs = su.in[ip];
          for (int v = 0; v < static_cast<int>(vcs.size()); ++v) {
            if (vcs[v].buf.empty()) continue;
            if (vcs[v].route_port != out) continue;
            cands.push_back({false, static_cast<Port>(ip), v});
          }
        }
        for (int r = 0; r < static_cast<int>(su.relays.size()); ++r) {
          if (su.relays[r].q.empty()) continue;
          if (su.relays[r].out_port != out) continue;
          cands.push_back({true, Port::Local, r});
        }
        if (cands.empty()) continue;
        int nc = static_cast<int>(cands.size());
        int offset = static_cast<int>(now % nc);
        for (int k = 0; k < nc; ++k) {
          const Candidate& c = cands[(offset + k) % nc];
          int claim = -1;
          if (eligible(s, out, c, claim)) {
            grants.push_back({s, out, c, claim});
            break;
          }
        }
      }
    }
    for (const Grant& g : grants) grant(g.s, g.out, g.c, g.claim);
    // Reap finished relay streams.
    for (int s = 0; s < n(); ++s) {
      auto& rel = sw[s].relays;
      if (!rel.empty())
        rel.erase(std::remove_if(rel.begin(), rel.end(),
                                 [](const RelayStream& r) { return r.done(); }),
                  rel.end());
    }
  }

  // --------------------------------------------------------------------
  // Per-cycle statics, sampling, watchdog.
  // --------------------------------------------------------------------

  void tick_statics() {
    if (!measuring) return;
    double cyc = cfg.energy.cycle_seconds();
    ledger.record_energy(
        EnergyClass::Leakage,
        cfg.energy.p_leak_switch_mw * 1e-3 * cyc * n());
    if (wireless_on()) {
      double mac = cfg.energy.mac_unit_mw(cfg.scheme) * 1e-3 * cyc;
      if (mac > 0.0)
        ledger.record_energy(EnergyClass::MacStatic, mac * n_wi());
    }
  }

  void tick_sampling() {
    if (demand_window == 0 || now < warmup) return;
    if ((now - warmup + 1) % demand_window != 0) return;
    for (int i = 0; i < n_wi(); ++i) {
      demand_series[i].push_back(wi[i].window_count);
      wi[i].window_count = 0;
    }
  }

  void watchdog_check() {
    if ((now & 2047) != 2047) return;
    size_t w = 0;
    for (PacketId id : live) {
      PacketInfo& pi = packets[id];
      if (pi.remaining <= 0) continue;
      if (now - pi.last_progress > cfg.blocked_watchdog_cycles)
        throw ProtocolError("packet " + std::to_string(id) +
                            " blocked beyond the watchdog limit");
      live[w++] = id;
    }
    live.resize(w);
  }

  // Unicast flit conservation: everything injected is buffered somewhere or
  // delivered. Walks all structures; used by validating runs.
  long long count_unicast_in_network() const {
    long long c = 0;
    auto unicast = [](const Flit& f) { return f.dest != kBroadcastDest; };
    for (const auto& su : sw)
      for (const auto& vcs : su.in)
        for (const auto& vc : vcs)
          for (const auto& f : vc.buf) c += unicast(f);
    for (const auto& u : wi) {
      for (const auto& vc : u.out)
        for (const auto& f : vc.buf) c += unicast(f);
      for (const auto& e : u.deser) c += unicast(e.flit);
    }
    for (const auto& slot : arrivals)
      for (const auto& a : slot) c += unicast(a.flit);
    return c;
  }

  void run_loop() {
    warmup = cfg.warmup_cycles;
    total_cycles = cfg.warmup_cycles + cfg.measure_cycles;
    if (demand_window > 0) demand_series.assign(std::max(n_wi(), 1), {});
    for (now = 0; now < total_cycles; ++now) {
      measuring = now >= warmup;
      for (auto& u : wi) drain_deserializer(u);
      commit_arrivals();
      spawn_traffic();
      inject();
      medium_tick();
      switch_alloc();
      tick_statics();
      tick_sampling();
      watchdog_check();
    }
    if (cfg.validate_protocol) {
      long long in_net = count_unicast_in_network();
      if (injected_unicast_flits != delivered_unicast_flits + in_net)
        throw ProtocolError("unicast flit conservation violated");
    }
  }
};

Simulation::Simulation(const ExperimentConfig& cfg)
    : impl_(std::make_unique<Impl>(cfg)) {}
Simulation::~Simulation() = default;

void Simulation::enable_demand_sampling(Cycle window_cycles) {
  impl_->demand_window = window_cycles;
}

const Topology& Simulation::topology() const { return impl_->topo; }
const ForwardingTable& Simulation::forwarding() const { return impl_->ft; }

SimResult Simulation::run() {
  impl_->run_loop();
  SimResult r;
  auto ledger = std::make_shared<MetricsLedger>(impl_->ledger);
  r.summary = summarize(*ledger, impl_->n(), impl_->cfg.measure_cycles,
                        impl_->cfg.energy.clock_ghz);
  r.summary.config_hash = impl_->cfg.hash();
  r.summary.seed = impl_->cfg.seed;
  r.summary.scheme = impl_->cfg.scheme;
  r.summary.pattern = impl_->cfg.trace_file.empty()
                          ? pattern_name(impl_->cfg.traffic.pattern)
                          : "trace";
  r.summary.temporal = impl_->cfg.trace_file.empty()
                           ? temporal_name(impl_->cfg.traffic.temporal)
                           : "trace";
  r.summary.load = impl_->cfg.traffic.injection_load;
  r.demand_windows = impl_->demand_series;
  r.cycles_run = impl_->total_cycles;
  for (int i = 0; i < static_cast<int>(EnergyClass::kCount); ++i)
    r.energy_class_j[i] = ledger->energy_class_j(static_cast<EnergyClass>(i));
  r.ledger = std::move(ledger);
  r.announce = {impl_->dbg_slots_total, impl_->dbg_skip_pkt5,
                impl_->dbg_skip_cap,    impl_->dbg_budget_bound,
                impl_->dbg_buffer_bound, impl_->dbg_tuple_bound};
  return r;
}

SimResult run_simulation(const ExperimentConfig& cfg) {
  Simulation sim(cfg);
  return sim.run();
}

}  // namespace wimesh
