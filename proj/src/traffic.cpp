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

#include "wimesh/traffic.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace wimesh {

const char* pattern_name(Pattern p) {
  switch (p) {
    case Pattern::Uniform: return "uniform";
    case Pattern::Hotspot: return "hotspot";
    case Pattern::BitComplement: return "bitcomp";
    case Pattern::BroadcastMix: return "broadcast";
  }
  return "?";
}

const char* temporal_name(Temporal t) {
  return t == Temporal::Bernoulli ? "bernoulli" : "selfsimilar";
}

void TrafficSpec::validate(int n_cores) const {
  if (injection_load <= 0.0 || injection_load > 1.0)
    throw ConfigError("injection load must be in (0, 1]");
  if (hotspot_fraction < 0.0 || hotspot_fraction > 1.0)
    throw ConfigError("hotspot fraction must be in [0, 1]");
  if (broadcast_fraction < 0.0 || broadcast_fraction > 1.0)
    throw ConfigError("broadcast fraction must be in [0, 1]");
  if (pattern == Pattern::Hotspot &&
      (hotspot_core >= n_cores || hotspot_core < -1))
    throw ConfigError("hotspot core out of range");
  if (pattern == Pattern::BitComplement && n_cores % 2 != 0)
    throw ConfigError("bit-complement needs an even core count");
  if (temporal == Temporal::SelfSimilar) {
    if (on_pareto_shape <= 1.0 || off_pareto_shape <= 1.0)
      throw ConfigError("pareto shapes must exceed 1");
    if (min_burst < 1 || burst_cap <= min_burst)
      throw ConfigError("burst bounds invalid");
  }
}

// CDF of the truncated-at-cap Pareto: P(X <= x) with all mass above cap
// lumped at cap.
static double pareto_cdf(double shape, double scale, long cap, double x) {
  if (x < scale) return 0.0;
  if (x >= static_cast<double>(cap)) return 1.0;
  return 1.0 - std::pow(scale / x, shape);
}

double discrete_pareto_mean(double shape, double scale, int min_burst,
                            long cap) {
  // length = max(min_burst, round(min(x, cap))); sum k * P(length == k).
  double mean = 0.0;
  double below = pareto_cdf(shape, scale, cap, min_burst + 0.5);
  mean += min_burst * below;
  for (long k = min_burst + 1; k < cap; ++k) {
    double p = pareto_cdf(shape, scale, cap, k + 0.5) -
               pareto_cdf(shape, scale, cap, k - 0.5);
    mean += static_cast<double>(k) * p;
  }
  double top = 1.0 - pareto_cdf(shape, scale, cap, cap - 0.5);
  mean += static_cast<double>(cap) * top;
  return mean;
}

double solve_pareto_scale(double shape, int min_burst, long cap,
                          double target_mean) {
  double lo = 1e-6, hi = static_cast<double>(cap);
  if (discrete_pareto_mean(shape, lo, min_burst, cap) > target_mean)
    return lo;
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (discrete_pareto_mean(shape, mid, min_burst, cap) < target_mean)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

TrafficGen::TrafficGen(const TrafficSpec& spec, int n_cores)
    : spec_(spec), n_cores_(n_cores) {
  spec_.validate(n_cores);
  cores_.resize(n_cores);
  for (int c = 0; c < n_cores; ++c)
    cores_[c].rng.seed(splitmix64(spec_.seed * 0x9e3779b97f4a7c15ull + c));

  if (spec_.temporal == Temporal::SelfSimilar && spec_.injection_load < 1.0) {
    mean_on_ = discrete_pareto_mean(spec_.on_pareto_shape, spec_.on_scale,
                                    spec_.min_burst, spec_.burst_cap);
    double target_off =
        mean_on_ * (1.0 - spec_.injection_load) / spec_.injection_load;
    double min_off = discrete_pareto_mean(spec_.off_pareto_shape, 1e-6,
                                          spec_.min_burst, spec_.burst_cap);
    double max_off = static_cast<double>(spec_.burst_cap);
    if (target_off < min_off || target_off > 0.98 * max_off)
      throw ConfigError(
          "self-similar load out of calibratable range; adjust on_scale, "
          "min_burst or burst_cap, or use bernoulli");
    off_scale_ = solve_pareto_scale(spec_.off_pareto_shape, spec_.min_burst,
                                    spec_.burst_cap, target_off);
    mean_off_ = discrete_pareto_mean(spec_.off_pareto_shape, off_scale_,
                                     spec_.min_burst, spec_.burst_cap);
  }
}

long TrafficGen::draw_burst(std::mt19937_64& rng, double shape,
                            double scale) const {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double u = 1.0 - uni(rng);  // in (0, 1]
  double x = scale * std::pow(u, -1.0 / shape);
  x = std::min(x, static_cast<double>(spec_.burst_cap));
  long len = std::lround(x);
  return std::max<long>(len, spec_.min_burst);
}

bool TrafficGen::should_inject(SwitchId core) {
  CoreState& cs = cores_[core];
  if (spec_.injection_load >= 1.0) return true;
  if (spec_.temporal == Temporal::Bernoulli) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    return uni(cs.rng) < spec_.injection_load;
  }
  while (cs.remaining == 0) {
    cs.on = !cs.on;
    cs.remaining = cs.on ? draw_burst(cs.rng, spec_.on_pareto_shape,
                                      spec_.on_scale)
                         : draw_burst(cs.rng, spec_.off_pareto_shape,
                                      off_scale_);
  }
  --cs.remaining;
  return cs.on;
}

int TrafficGen::next_destination(SwitchId source) {
  CoreState& cs = cores_[source];
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  auto uniform_other = [&]() {
    std::uniform_int_distribution<int> pick(0, n_cores_ - 2);
    int d = pick(cs.rng);
    return d >= source ? d + 1 : d;
  };
  switch (spec_.pattern) {
    case Pattern::Uniform:
      return uniform_other();
    case Pattern::Hotspot: {
      SwitchId hot = spec_.hotspot_core;
      if (uni(cs.rng) < spec_.hotspot_fraction && hot != source) return hot;
      return uniform_other();
    }
    case Pattern::BitComplement:
      // core i (1-based) sends to N - i + 1; 0-based: N - 1 - i.
      return n_cores_ - 1 - source;
    case Pattern::BroadcastMix:
      if (uni(cs.rng) < spec_.broadcast_fraction) return kBroadcastDest;
      return uniform_other();
  }
  return uniform_other();
}

std::vector<TraceEvent> parse_trace(std::istream& in,
                                    const std::string& name) {
  std::vector<TraceEvent> events;
  std::string line;
  long lineno = 0;
  long long prev_cycle = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ls(line);
    long long cycle;
    long source, dest, size;
    if (!(ls >> cycle >> source >> dest >> size) || size <= 0 || cycle < 0)
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": malformed trace line");
    if (cycle < prev_cycle)
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": cycle goes backwards");
    prev_cycle = cycle;
    events.push_back({static_cast<Cycle>(cycle),
                      static_cast<SwitchId>(source), static_cast<int>(dest),
                      static_cast<int>(size)});
  }
  return events;
}

std::vector<TraceEvent> load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace file " + path);
  return parse_trace(in, path);
}

}  // namespace wimesh
