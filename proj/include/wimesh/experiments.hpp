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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wimesh/config.hpp"
#include "wimesh/network.hpp"

namespace wimesh {

// One latency/bandwidth curve point.
struct SweepPoint {
  double load = 0.0;
  RunSummary summary;
};

struct LoadSweepResult {
  std::vector<SweepPoint> points;
  // First swept load classified as saturated, if any.
  std::optional<double> saturation_load;
  // Accepted bandwidth per core at the last pre-saturation point.
  double peak_bandwidth_per_core_bps = 0.0;
  double zero_load_latency = 0.0;  // latency at the lowest swept load
};

// Saturation rule: a point saturates when its average latency exceeds
// latency_factor times the lowest-load latency, or when accepted throughput
// grows less than min_gain over the previous point.
struct SaturationRule {
  double latency_factor = 5.0;
  double min_gain = 0.01;
};

// Runs each load in ascending order (loads must be sorted).
LoadSweepResult sweep_load(const ExperimentConfig& base,
                           const std::vector<double>& loads,
                           const SaturationRule& rule = {}, int jobs = 0);

struct SubnetSweepRow {
  int subnet_size = 0;
  int n_wis = 0;
  double peak_bandwidth_per_core_bps = 0.0;
};

struct SubnetSweepResult {
  std::vector<SubnetSweepRow> rows;
  int best_subnet_size = 0;
};

// Token-MAC uniform-random bandwidth sweep per subnet size.
SubnetSweepResult sweep_subnet(const ExperimentConfig& base,
                               const std::vector<int>& sizes,
                               const std::vector<double>& loads,
                               const SaturationRule& rule = {}, int jobs = 0);

struct SchemeComparison {
  Scheme scheme;
  LoadSweepResult sweep;
  // Peak bandwidth relative to the named baseline, in percent.
  double peak_gain_vs_baseline_pct = 0.0;
  double wasted_slot_fraction = 0.0;  // flit-weighted across swept loads
};

struct CompareResult {
  std::vector<SchemeComparison> schemes;
  Scheme baseline;
};

// Runs a load sweep per scheme with all non-MAC parameters shared and
// reports per-scheme peaks plus percentage deltas against the baseline.
CompareResult compare_schemes(const ExperimentConfig& base,
                              const std::vector<Scheme>& schemes,
                              Scheme baseline,
                              const std::vector<double>& loads,
                              const SaturationRule& rule = {}, int jobs = 0);

// Runs `fn(i)` for i in [0, count) on up to `jobs` threads (hardware
// concurrency when 0). Results are independent of scheduling.
void parallel_for(int count, int jobs, const std::function<void(int)>& fn);

std::string sweep_csv(const LoadSweepResult& r);
std::string compare_csv(const CompareResult& r);

// Minimal static SVG with one polyline per labelled series.
std::string svg_line_chart(const std::string& title,
                           const std::string& x_label,
                           const std::string& y_label,
                           const std::vector<std::string>& labels,
                           const std::vector<std::vector<double>>& xs,
                           const std::vector<std::vector<double>>& ys);

}  // namespace wimesh
