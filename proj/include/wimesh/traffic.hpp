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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "wimesh/common.hpp"

namespace wimesh {

enum class Pattern : std::uint8_t {
  Uniform,
  Hotspot,
  BitComplement,
  BroadcastMix,
};

enum class Temporal : std::uint8_t {
  Bernoulli,
  SelfSimilar,
};

struct TrafficSpec {
  Pattern pattern = Pattern::Uniform;
  double injection_load = 0.1;       // flits per core per cycle, (0, 1]
  double hotspot_fraction = 0.10;
  SwitchId hotspot_core = -1;        // -1: resolved to the first WI core
  double broadcast_fraction = 0.0;
  Temporal temporal = Temporal::SelfSimilar;
  double on_pareto_shape = 1.9;
  double off_pareto_shape = 1.25;
  int min_burst = 2;                 // cycles
  double on_scale = 8.0;             // Pareto scale of the ON distribution
  long burst_cap = 2500;             // truncation keeps long-run means finite
  std::uint64_t seed = 1;

  void validate(int n_cores) const;
};

const char* pattern_name(Pattern p);
const char* temporal_name(Temporal t);

// Per-run injection generator. Destinations and injection timing are drawn
// from per-core streams seeded by (seed, core) only, so the offered traffic
// is identical across MAC schemes for a given seed.
class TrafficGen {
 public:
  TrafficGen(const TrafficSpec& spec, int n_cores);

  // Destination for the next packet from `source`: a core id, or
  // kBroadcastDest.
  int next_destination(SwitchId source);

  // One 0/1 draw per core per cycle; long-run mean equals injection_load.
  bool should_inject(SwitchId core);

  const TrafficSpec& spec() const { return spec_; }

  // Mean ON/OFF burst lengths after discretization (exposed for tests).
  double mean_on() const { return mean_on_; }
  double mean_off() const { return mean_off_; }

 private:
  struct CoreState {
    std::mt19937_64 rng;
    bool on = false;
    long remaining = 0;  // cycles left in the current ON or OFF burst
  };

  long draw_burst(std::mt19937_64& rng, double shape, double scale) const;

  TrafficSpec spec_;
  int n_cores_;
  double off_scale_ = 0.0;
  double mean_on_ = 0.0;
  double mean_off_ = 0.0;
  std::vector<CoreState> cores_;
};

// Expected value of the discretized truncated Pareto burst length
// max(min_burst, round(x)) with x ~ Pareto(shape, scale) capped at cap.
double discrete_pareto_mean(double shape, double scale, int min_burst,
                            long cap);

// Solves for the Pareto scale that hits a target discrete mean burst length.
double solve_pareto_scale(double shape, int min_burst, long cap,
                          double target_mean);

// One replayed injection event.
struct TraceEvent {
  Cycle cycle;
  SwitchId source;
  int dest;  // core id or kBroadcastDest
  int size_flits;
};

// Parses a plain-text trace: one `cycle source dest size` line per event,
// dest -1 meaning broadcast, '#' comments. Rejects non-monotone cycles and
// malformed lines with the offending line number.
std::vector<TraceEvent> load_trace(const std::string& path);
std::vector<TraceEvent> parse_trace(std::istream& in,
                                    const std::string& name);

}  // namespace wimesh
