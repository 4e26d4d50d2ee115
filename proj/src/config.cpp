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

#include "wimesh/config.hpp"

#include "wimesh/topology.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace wimesh {

int ExperimentConfig::flit_airtime_cycles() const {
  return static_cast<int>(
      std::ceil(flit_bits * energy.clock_ghz / data_rate_gbps));
}

void ExperimentConfig::validate() const {
  if (rows < 2 || cols < 2) throw ConfigError("rows and cols must be >= 2");
  if (die_edge_mm <= 0) throw ConfigError("die edge must be positive");
  if (scheme != Scheme::Wired) {
    if (subnet_size < 1 || n_cores() % subnet_size != 0)
      throw ConfigError("subnet size must divide the core count");
    choose_tile_shape(rows, cols, subnet_size);  // throws if untileable
    if (n_wis() < 2)
      throw ConfigError(
          "wireless schemes need at least 2 WIs; use scheme = wired");
    if (n_wis() > 15)
      throw ConfigError("at most 15 WIs (4-bit DestWI, one broadcast value)");
  }
  if (flit_bits < 8 || flit_bits > 1024) throw ConfigError("bad flit width");
  if (packet_size_flits < 1) throw ConfigError("bad packet size");
  if (vc_count_wired < 1 || vc_depth_wired < 1 || wi_vc_count < 1)
    throw ConfigError("bad VC configuration");
  if (wi_vc_count > 31)
    throw ConfigError("at most 31 WI VCs (5-bit PktID namespace)");
  if (scheme == Scheme::TMac &&
      effective_wi_vc_depth() < packet_size_flits)
    throw ConfigError(
        "tmac requires WI VC depth >= packet size (whole-packet slots)");
  if (max_tuples < 1 || max_tuples > 12)
    throw ConfigError("max_tuples must be in [1, 12] (3-bit size field)");
  if (wireless_hop_weight <= 0)
    throw ConfigError("wireless hop weight must be positive");
  if (data_rate_gbps <= 0 || energy.clock_ghz <= 0)
    throw ConfigError("rates must be positive");
  if (measure_cycles == 0) throw ConfigError("measure_cycles must be > 0");
  if (trace_file.empty()) traffic.validate(n_cores());
  if (scheme == Scheme::PSam || scheme == Scheme::Racm) {
    if (effective_epoch_flits() < n_wis())
      throw ConfigError("epoch_flits must cover one flit per WI");
  }
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  os << "rows=" << rows << ";cols=" << cols
     << ";die=" << num(die_edge_mm) << ";subnet=" << subnet_size
     << ";scheme=" << scheme_name(scheme) << ";kp=" << num(weights.kp)
     << ";ki=" << num(weights.ki) << ";kd=" << num(weights.kd)
     << ";ef=" << effective_epoch_flits() << ";floor=" << starvation_floor
     << ";tuples=" << max_tuples << ";truemean=" << predictor_true_mean
     << ";pattern=" << pattern_name(traffic.pattern)
     << ";load=" << num(traffic.injection_load)
     << ";hotfrac=" << num(traffic.hotspot_fraction)
     << ";hotcore=" << traffic.hotspot_core
     << ";bcfrac=" << num(traffic.broadcast_fraction)
     << ";temporal=" << temporal_name(traffic.temporal)
     << ";aon=" << num(traffic.on_pareto_shape)
     << ";aoff=" << num(traffic.off_pareto_shape)
     << ";minburst=" << traffic.min_burst
     << ";onscale=" << num(traffic.on_scale)
     << ";cap=" << traffic.burst_cap << ";trace=" << trace_file
     << ";flit=" << flit_bits << ";pkt=" << packet_size_flits
     << ";vcw=" << vc_count_wired << "x" << vc_depth_wired
     << ";vcwi=" << wi_vc_count << "x" << effective_wi_vc_depth()
     << ";ww=" << num(wireless_hop_weight) << ";rate=" << num(data_rate_gbps)
     << ";warm=" << warmup_cycles << ";meas=" << measure_cycles
     << ";esw=" << num(energy.e_switch_per_flit_pj)
     << ";ewire=" << num(energy.e_wire_per_bit_mm_pj)
     << ";ewl=" << num(energy.e_wireless_per_bit_pj)
     << ";prx=" << num(energy.p_rx_on_mw) << ";ptx=" << num(energy.p_tx_on_mw)
     << ";pleak=" << num(energy.p_leak_switch_mw)
     << ";clk=" << num(energy.clock_ghz)
     << ";idlelisten=" << count_idle_listening;
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  return fnv1a(canonical_text());
}

namespace {

long to_long(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw ConfigError("config key '" + k + "': expected integer, got '" + v +
                      "'");
  }
}

double to_double(const std::string& k, const std::string& v) {
  try {
    size_t pos = 0;
    double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (...) {
    throw ConfigError("config key '" + k + "': expected number, got '" + v +
                      "'");
  }
}

bool to_bool(const std::string& k, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + k + "': expected boolean, got '" + v +
                    "'");
}

}  // namespace

void ExperimentConfig::apply(const std::string& key,
                             const std::string& value) {
  if (key == "rows") rows = static_cast<int>(to_long(key, value));
  else if (key == "cols") cols = static_cast<int>(to_long(key, value));
  else if (key == "die_edge_mm") die_edge_mm = to_double(key, value);
  else if (key == "subnet_size")
    subnet_size = static_cast<int>(to_long(key, value));
  else if (key == "scheme") scheme = scheme_from_name(value);
  else if (key == "kp") weights.kp = to_double(key, value);
  else if (key == "ki") weights.ki = to_double(key, value);
  else if (key == "kd") weights.kd = to_double(key, value);
  else if (key == "epoch_flits") epoch_flits = to_long(key, value);
  else if (key == "starvation_floor")
    starvation_floor = to_bool(key, value);
  else if (key == "max_tuples")
    max_tuples = static_cast<int>(to_long(key, value));
  else if (key == "predictor_true_mean")
    predictor_true_mean = to_bool(key, value);
  else if (key == "pattern") {
    if (value == "uniform") traffic.pattern = Pattern::Uniform;
    else if (value == "hotspot") traffic.pattern = Pattern::Hotspot;
    else if (value == "bitcomp") traffic.pattern = Pattern::BitComplement;
    else if (value == "broadcast") traffic.pattern = Pattern::BroadcastMix;
    else throw ConfigError("unknown traffic pattern: " + value);
  } else if (key == "injection_load")
    traffic.injection_load = to_double(key, value);
  else if (key == "hotspot_fraction")
    traffic.hotspot_fraction = to_double(key, value);
  else if (key == "hotspot_core")
    traffic.hotspot_core = static_cast<int>(to_long(key, value));
  else if (key == "broadcast_fraction")
    traffic.broadcast_fraction = to_double(key, value);
  else if (key == "temporal") {
    if (value == "bernoulli") traffic.temporal = Temporal::Bernoulli;
    else if (value == "selfsimilar") traffic.temporal = Temporal::SelfSimilar;
    else throw ConfigError("unknown temporal mode: " + value);
  } else if (key == "on_pareto_shape")
    traffic.on_pareto_shape = to_double(key, value);
  else if (key == "off_pareto_shape")
    traffic.off_pareto_shape = to_double(key, value);
  else if (key == "min_burst")
    traffic.min_burst = static_cast<int>(to_long(key, value));
  else if (key == "on_scale") traffic.on_scale = to_double(key, value);
  else if (key == "burst_cap") traffic.burst_cap = to_long(key, value);
  else if (key == "trace_file") trace_file = value;
  else if (key == "flit_bits")
    flit_bits = static_cast<int>(to_long(key, value));
  else if (key == "packet_size_flits")
    packet_size_flits = static_cast<int>(to_long(key, value));
  else if (key == "vc_count_wired")
    vc_count_wired = static_cast<int>(to_long(key, value));
  else if (key == "vc_depth_wired")
    vc_depth_wired = static_cast<int>(to_long(key, value));
  else if (key == "wi_vc_count")
    wi_vc_count = static_cast<int>(to_long(key, value));
  else if (key == "wi_vc_depth")
    wi_vc_depth = static_cast<int>(to_long(key, value));
  else if (key == "wireless_hop_weight")
    wireless_hop_weight = to_double(key, value);
  else if (key == "data_rate_gbps") data_rate_gbps = to_double(key, value);
  else if (key == "warmup_cycles")
    warmup_cycles = static_cast<Cycle>(to_long(key, value));
  else if (key == "measure_cycles")
    measure_cycles = static_cast<Cycle>(to_long(key, value));
  else if (key == "seed")
    seed = static_cast<std::uint64_t>(to_long(key, value));
  else if (key == "validate_protocol")
    validate_protocol = to_bool(key, value);
  else if (key == "count_idle_listening")
    count_idle_listening = to_bool(key, value);
  else if (key == "e_switch_per_flit_pj")
    energy.e_switch_per_flit_pj = to_double(key, value);
  else if (key == "e_wire_per_bit_mm_pj")
    energy.e_wire_per_bit_mm_pj = to_double(key, value);
  else if (key == "e_wireless_per_bit_pj")
    energy.e_wireless_per_bit_pj = to_double(key, value);
  else if (key == "p_rx_on_mw") energy.p_rx_on_mw = to_double(key, value);
  else if (key == "p_tx_on_mw") energy.p_tx_on_mw = to_double(key, value);
  else if (key == "p_leak_switch_mw")
    energy.p_leak_switch_mw = to_double(key, value);
  else if (key == "clock_ghz") energy.clock_ghz = to_double(key, value);
  else throw ConfigError("unknown config key: " + key);
}

ExperimentConfig ExperimentConfig::from_text(const std::string& text,
                                             const std::string& name) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cut = line.find_first_of("#");
    if (cut != std::string::npos) line.erase(cut);
    cut = line.find("//");
    if (cut != std::string::npos) line.erase(cut);
    if (!line.empty() && line.back() == ';') line.pop_back();
    auto eq = line.find('=');
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (eq == std::string::npos) {
      if (!trim(line).empty())
        throw ConfigError(name + ":" + std::to_string(lineno) +
                          ": expected 'key = value'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(name + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    cfg.apply(key, value);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_text(ss.str(), path);
}

}  // namespace wimesh
